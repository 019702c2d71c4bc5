"""The auto-selector rule table and its delegation."""

from bbohub.samplers import AutoSampler, auto_select
from bbohub.samplers.nelder_mead import NelderMeadSampler
from bbohub.space import Direction, SearchSpace, categorical_param, float_param, int_param


def space_of(**kwargs):
    return SearchSpace(kwargs)


class TestRuleTable:
    def test_multi_objective_always_nsga2(self):
        assert auto_select(space_of(x=float_param(0, 1)), 2) == "nsga2"
        assert auto_select(space_of(c=categorical_param(["a"])), 3) == "nsga2"

    def test_categorical_single_objective_goes_to_tpe(self):
        space = space_of(x=float_param(0, 1), c=categorical_param(["a", "b"]))
        assert auto_select(space, 1) == "tpe"

    def test_int_single_objective_goes_to_tpe(self):
        # the simplex method rejects integer coordinates, so they route to tpe
        assert auto_select(space_of(k=int_param(0, 5)), 1) == "tpe"

    def test_all_float_single_objective_goes_to_nelder_mead(self):
        space = space_of(x=float_param(0, 1), y=float_param(-1, 1))
        assert auto_select(space, 1) == "nelder_mead"

    def test_pure_function_of_inputs(self):
        space = space_of(x=float_param(0, 1))
        assert all(auto_select(space, 1) == "nelder_mead" for _ in range(5))


class TestDelegation:
    def test_all_float_single_objective_matches_nelder_mead(self):
        space = space_of(x=float_param(-5, 5), y=float_param(-5, 5))
        directions = [Direction.MINIMIZE]
        auto = AutoSampler()
        nm = NelderMeadSampler()
        assert auto.ask(space, directions, 0, [], 9) == nm.ask(space, directions, 0, [], 9)

    def test_multi_objective_delegates_to_nsga2(self):
        from bbohub.samplers import Nsga2Sampler

        space = space_of(x=float_param(-5, 5))
        directions = [Direction.MINIMIZE, Direction.MINIMIZE]
        auto = AutoSampler()
        assert auto.ask(space, directions, 0, [], 9) == Nsga2Sampler().ask(space, directions, 0, [], 9)
