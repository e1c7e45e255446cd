"""Package-level surface: everything in __all__ resolves, version is set."""

import posteval


def test_all_exports_resolve():
    missing = [name for name in posteval.__all__ if not hasattr(posteval, name)]
    assert missing == []


def test_core_workflow_reachable_from_the_top_level():
    state = posteval.start_session(
        posteval.default_tree(),
        posteval.Segment("s1", "da", "msa"),
        posteval.SystemOutput("s1", "sysA", "hyp"),
        "ann1",
    )
    for _ in range(5):
        state = posteval.answer(state, "no")
    annotation = posteval.finalize(state)
    assert posteval.segs(annotation, posteval.ScoringConfig()) == 0


def test_version_is_a_string():
    assert isinstance(posteval.__version__, str)
