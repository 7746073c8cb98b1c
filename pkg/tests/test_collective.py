import numpy as np
import pytest

from gcqca import array_core as ac
from gcqca import collective as co
from gcqca.collective import GateId, Orientation, Phase, PulseStep
from gcqca.errors import MissingParameter

from .oracle import collective_matrix, random_state, random_unitary


def all_parameterless_gates():
    return [
        co.swap_gate(),
        co.nand_gate(),
        co.cnot(Orientation.CTRL_LEFT),
        co.cnot(Orientation.CTRL_RIGHT),
        co.ctrl_h(Orientation.CTRL_LEFT),
        co.ctrl_h(Orientation.CTRL_RIGHT),
        co.ctrl_y(Orientation.CTRL_LEFT),
        co.ctrl_y(Orientation.CTRL_RIGHT),
    ]


def apply_steps(state, steps):
    for step in steps:
        co.apply_collective(state, step)
    return state


class TestGateConstruction:
    def test_symmetric_gate_rejects_orientation(self):
        with pytest.raises(ValueError):
            co.CollectiveGate(GateId.SWAP, Orientation.CTRL_LEFT)

    def test_oriented_gate_requires_orientation(self):
        with pytest.raises(ValueError):
            co.CollectiveGate(GateId.CNOT)

    def test_ctrl_u_requires_parameter(self):
        with pytest.raises(MissingParameter):
            co.CollectiveGate(GateId.CTRL_U, Orientation.CTRL_LEFT)

    def test_parameter_only_for_ctrl_u(self):
        with pytest.raises(ValueError):
            co.CollectiveGate(GateId.CNOT, Orientation.CTRL_LEFT,
                              u=np.eye(2))


class TestPhasePairs:
    def test_alpha_seven_cells(self):
        d = ac.make_descriptor(7)
        assert co.phase_pairs(d, Phase.ALPHA) == [(0, 1), (2, 3), (4, 5)]

    def test_beta_seven_cells(self):
        d = ac.make_descriptor(7)
        assert co.phase_pairs(d, Phase.BETA) == [(1, 2), (3, 4), (5, 6)]

    def test_beta_idles_both_ends_even_n(self):
        d = ac.make_descriptor(6)
        pairs = co.phase_pairs(d, Phase.BETA)
        touched = {c for p in pairs for c in p}
        assert 0 not in touched and 5 not in touched


class TestGateMatrix:
    def test_swap(self):
        m = co.gate_matrix(co.swap_gate())
        np.testing.assert_array_equal(m, np.eye(4)[[0, 2, 1, 3]])

    def test_nand_sign(self):
        m = co.gate_matrix(co.nand_gate())
        np.testing.assert_array_equal(np.diag(m), [1, 1, 1, -1])

    def test_cnot_left_control(self):
        m = co.gate_matrix(co.cnot(Orientation.CTRL_LEFT))
        # |10> -> |11>, |01> untouched
        assert m[3, 2] == 1 and m[1, 1] == 1

    def test_cnot_right_control(self):
        m = co.gate_matrix(co.cnot(Orientation.CTRL_RIGHT))
        # |01> -> |11>, |10> untouched
        assert m[3, 1] == 1 and m[2, 2] == 1

    def test_all_unitary(self):
        for g in all_parameterless_gates():
            ac.check_unitary(co.gate_matrix(g))


class TestApplyCollective:
    def test_swap_alpha_truth_table(self):
        d = ac.make_descriptor(4)
        s = ac.basis_state(d, [1, 0, 1, 0])
        co.apply_collective(s, PulseStep(Phase.ALPHA, co.swap_gate()))
        assert s.amplitudes[ac.basis_index(d, [0, 1, 0, 1])] == 1.0

    def test_swap_beta_idles_boundaries(self):
        d = ac.make_descriptor(4)
        s = ac.basis_state(d, [1, 1, 0, 1])
        co.apply_collective(s, PulseStep(Phase.BETA, co.swap_gate()))
        assert s.amplitudes[ac.basis_index(d, [1, 0, 1, 1])] == 1.0

    @pytest.mark.parametrize("n", [4, 5, 6])
    @pytest.mark.parametrize("phase", [Phase.ALPHA, Phase.BETA])
    def test_against_oracle(self, n, phase):
        rng = np.random.default_rng(10 * n + (phase is Phase.BETA))
        d = ac.make_descriptor(n)
        gates = all_parameterless_gates() + [
            co.ctrl_u(random_unitary(2, rng), Orientation.CTRL_LEFT),
            co.ctrl_u(random_unitary(2, rng), Orientation.CTRL_RIGHT),
        ]
        for gate in gates:
            v = random_state(n, rng)
            s = ac.QuantumState(d, v.copy())
            co.apply_collective(s, PulseStep(phase, gate))
            expect = collective_matrix(n, co.phase_pairs(d, phase),
                                       co.gate_matrix(gate)) @ v
            np.testing.assert_allclose(s.amplitudes, expect, atol=1e-12)

    def test_ctrl_y_phases(self):
        # control left: |1 0> -> i |1 1>, |1 1> -> -i |1 0>
        d = ac.make_descriptor(2)
        s = ac.basis_state(d, [1, 0])
        co.apply_collective(s, PulseStep(Phase.ALPHA,
                                         co.ctrl_y(Orientation.CTRL_LEFT)))
        assert s.amplitudes[3] == pytest.approx(1j)
        s = ac.basis_state(d, [1, 1])
        co.apply_collective(s, PulseStep(Phase.ALPHA,
                                         co.ctrl_y(Orientation.CTRL_LEFT)))
        assert s.amplitudes[2] == pytest.approx(-1j)

    def test_spectator_cells_untouched(self):
        # an ALPHA step on odd n leaves the last cell alone
        rng = np.random.default_rng(11)
        d = ac.make_descriptor(5)
        v = random_state(5, rng)
        s = ac.QuantumState(d, v.copy())
        co.apply_collective(s, PulseStep(Phase.ALPHA,
                                         co.cnot(Orientation.CTRL_LEFT)))
        # reduced population of cell 4 is unchanged
        pop = lambda a: np.linalg.norm(a.reshape(16, 2), axis=0) ** 2
        np.testing.assert_allclose(pop(s.amplitudes), pop(v), atol=1e-12)


class TestInvolutionsAndReversal:
    def test_parameterless_gates_are_involutions(self):
        for g in all_parameterless_gates():
            m = co.gate_matrix(g)
            np.testing.assert_allclose(m @ m, np.eye(4), atol=1e-12)

    def test_inverse_of_ctrl_u(self):
        rng = np.random.default_rng(12)
        g = co.ctrl_u(random_unitary(2, rng), Orientation.CTRL_LEFT)
        m = co.gate_matrix(g) @ co.gate_matrix(g.inverse())
        np.testing.assert_allclose(m, np.eye(4), atol=1e-12)

    def test_reverse_steps_undoes_program(self):
        rng = np.random.default_rng(13)
        d = ac.make_descriptor(6)
        gates = all_parameterless_gates()
        steps = [PulseStep(rng.choice([Phase.ALPHA, Phase.BETA]),
                           gates[rng.integers(len(gates))])
                 for _ in range(12)]
        steps.append(PulseStep(Phase.ALPHA,
                               co.ctrl_u(random_unitary(2, rng),
                                         Orientation.CTRL_RIGHT)))
        v = random_state(6, rng)
        s = ac.QuantumState(d, v.copy())
        apply_steps(s, steps)
        apply_steps(s, co.reverse_steps(steps))
        np.testing.assert_allclose(s.amplitudes, v, atol=1e-12)

    def test_reverse_of_reverse(self):
        steps = [PulseStep(Phase.ALPHA, co.swap_gate()),
                 PulseStep(Phase.BETA, co.cnot(Orientation.CTRL_LEFT))]
        again = co.reverse_steps(co.reverse_steps(steps))
        assert [(s.phase, s.gate.gate_id, s.gate.orientation)
                for s in again] == \
               [(s.phase, s.gate.gate_id, s.gate.orientation) for s in steps]
