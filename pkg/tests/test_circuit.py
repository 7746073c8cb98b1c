import numpy as np
import pytest

from gcqca import circuit as ci
from gcqca.errors import ParseError


class TestParse:
    def test_named_single_qubit(self):
        c = ci.parse_circuit("H 0\nX 1\nT 0\n", 2)
        assert len(c.instructions) == 3
        ins = c.instructions[0]
        assert isinstance(ins, ci.U1) and ins.q == 0
        np.testing.assert_array_equal(ins.u, ci.NAMED_1Q["H"])

    def test_two_qubit(self):
        c = ci.parse_circuit("CNOT 0 1\nCZ 1 0\n", 2)
        a, b = c.instructions
        assert (a.q_control, a.q_target) == (0, 1)
        assert (b.q_control, b.q_target) == (1, 0)
        np.testing.assert_array_equal(b.u, np.diag([1, -1]))

    def test_comments_and_blank_lines(self):
        c = ci.parse_circuit("# header\n\nH 0  # trailing\n", 1)
        assert len(c.instructions) == 1

    def test_case_insensitive_mnemonic(self):
        c = ci.parse_circuit("h 0\ncnot 0 1\n", 2)
        assert len(c.instructions) == 2

    def test_u1_matrix(self):
        line = "U1 0 0 0 1 0 1 0 0 0\n"    # X as explicit floats
        c = ci.parse_circuit(line, 1)
        np.testing.assert_allclose(c.instructions[0].u, ci.NAMED_1Q["X"])

    def test_cu_matrix(self):
        line = "CU 1 0 1 0 0 0 0 0 0 1\n"  # controlled-S, control q1
        c = ci.parse_circuit(line, 2)
        ins = c.instructions[0]
        assert (ins.q_control, ins.q_target) == (1, 0)
        np.testing.assert_allclose(ins.u, np.diag([1, 1j]))

    def test_unknown_mnemonic(self):
        with pytest.raises(ParseError):
            ci.parse_circuit("FOO 0\n", 1)

    def test_qubit_out_of_range(self):
        with pytest.raises(ParseError):
            ci.parse_circuit("H 2\n", 2)

    def test_control_equals_target(self):
        with pytest.raises(ParseError):
            ci.parse_circuit("CNOT 1 1\n", 2)

    def test_non_unitary_matrix(self):
        with pytest.raises(ParseError):
            ci.parse_circuit("U1 0 1 0 1 0 1 0 1 0\n", 1)

    def test_error_carries_line_number(self):
        with pytest.raises(ParseError) as exc:
            ci.parse_circuit("H 0\nBAD 0\n", 1)
        assert "2" in str(exc.value)

    def test_wrong_arity(self):
        with pytest.raises(ParseError):
            ci.parse_circuit("H 0 1\n", 2)
        with pytest.raises(ParseError):
            ci.parse_circuit("CNOT 0\n", 2)
