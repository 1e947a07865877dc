# Copyright 2026 The NomaMec Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import pytest

import nomamec


def test_version():
    assert nomamec.__version__ == "1.0.0"


def test_lambert_identity():
    for x in (0.0, 0.5, 1.0, math.e, 1e3, 1e6):
        w = nomamec.lambert_w0(x)
        assert abs(w * math.exp(w) - x) <= 1e-12 * max(x, 1.0)


def test_solve_pair_roundtrip():
    params = nomamec.SystemParams()
    ctx = nomamec.sample_pair_context(1, 0, params)
    ctx.validate()
    result = nomamec.solve_pair(ctx)
    assert result.E_tot == pytest.approx(result.E_loc + result.E_off, rel=1e-12)
    assert result.E_tot > 0.0
    assert 0.0 <= result.beta <= 1.0
    assert result.P_n >= 0.0 and result.P_r >= 0.0

    oracle = nomamec.grid_oracle(ctx, 64)
    assert result.E_tot <= oracle.E_tot + 1e-9


def test_scheme_comparison_dominance():
    params = nomamec.SystemParams()
    for trial in range(5):
        ctx = nomamec.sample_pair_context(2, trial, params)
        schemes = nomamec.compare_schemes(ctx)
        assert schemes.hybrid <= schemes.full_offload + 1e-12
        assert schemes.hybrid <= schemes.fixed_order + 1e-12
        assert schemes.hybrid <= schemes.oma + 1e-12


def test_pairing_roundtrip():
    for k in (4, 6):
        count = nomamec.pairing_count(k)
        for action in range(count):
            pairing = nomamec.action_to_pairing(action, k)
            assert nomamec.pairing_to_action(pairing) == action
    with pytest.raises(Exception):
        nomamec.action_to_pairing(nomamec.pairing_count(4), 4)


def test_grouping_energy_matches_pair_sum():
    params = nomamec.SystemParams()
    env = nomamec.GroupingEnv(params, 4, 9)
    state = env.state
    pairing = nomamec.action_to_pairing(0, 4)
    total = nomamec.grouping_energy(state, pairing, params)
    parts = sum(
        nomamec.solve_pair(nomamec.make_pair_context(state, u, v, params)).E_tot
        for u, v in pairing.pairs
    )
    assert total == pytest.approx(parts, rel=1e-12)


def test_validate_solver_small():
    status, report = nomamec.validate_solver(instances=3, resolution=32, seed=1)
    assert status == 0
    assert "PASS" in report
