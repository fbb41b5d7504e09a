import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rwasim.device import (
    DeviceSpec,
    DeviceSpecError,
    VoltageBoundError,
    VoltageConfig,
    build_hamiltonian,
    default_device,
    device_spec_from_dict,
    load_device_spec,
    save_device_spec,
    validate_voltages,
)


class TestDeviceSpecLoading:
    def test_minimal_document_gets_defaults(self, tmp_path):
        path = tmp_path / "dev.yaml"
        path.write_text("n_guides: 11\nn_electrodes: 22\ncoupling_length: 24\n")
        spec = load_device_spec(path)
        assert spec.field_equal(default_device())

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(DeviceSpecError, match="base_coupling"):
            DeviceSpec(base_coupling=np.full(9, 0.1))

    def test_round_trip(self, tmp_path, device):
        path = tmp_path / "dev.yaml"
        save_device_spec(device, path)
        assert load_device_spec(path).field_equal(device)

    def test_negative_base_coupling_rejected(self):
        bc = np.full(10, 0.1)
        bc[3] = -0.01
        with pytest.raises(DeviceSpecError, match="base_coupling"):
            DeviceSpec(base_coupling=bc)

    def test_non_positive_length_rejected(self):
        with pytest.raises(DeviceSpecError, match="coupling_length"):
            DeviceSpec(coupling_length=0.0)

    def test_missing_numeric_field(self):
        with pytest.raises(DeviceSpecError):
            device_spec_from_dict({"base_beta": ["a", "b"]})

    def test_unknown_field_rejected(self):
        with pytest.raises(DeviceSpecError, match="unknown"):
            device_spec_from_dict({"n_waveguides": 11})

    def test_sparse_triplet_sensitivities(self, tmp_path):
        doc = """
n_guides: 11
n_electrodes: 22
coupling_length: 24.0
coupling_sensitivity:
  - [2, 4, -0.01]
"""
        path = tmp_path / "dev.yaml"
        path.write_text(doc)
        spec = load_device_spec(path)
        assert spec.coupling_sensitivity[1, 3] == -0.01
        assert np.count_nonzero(spec.coupling_sensitivity) == 1


class TestBuildHamiltonian:
    def test_zero_voltage_identity(self, device, zero_volts):
        h = build_hamiltonian(device, zero_volts)
        np.testing.assert_array_equal(h.diag, device.base_beta)
        np.testing.assert_array_equal(h.offdiag, device.base_coupling)

    def test_linear_coupling_shift(self):
        # C23 sensitivity -0.01 on electrode 4, base 0.10, V4 = 7 -> 0.03
        spec = DeviceSpec(base_coupling=np.full(10, 0.10))
        v = VoltageConfig.zeros(22).with_electrode(4, 7.0)
        h = build_hamiltonian(spec, v)
        assert h.offdiag[1] == pytest.approx(0.03, abs=1e-15)

    def test_over_limit_voltage_names_electrode(self, device):
        v = VoltageConfig.zeros(22).with_electrode(1, 10.5)
        with pytest.raises(VoltageBoundError, match="electrode 1"):
            build_hamiltonian(device, v)

    def test_default_electrode_pattern(self, device, zero_volts):
        h0 = build_hamiltonian(device, zero_volts)
        for n in range(1, device.n_guides + 1):
            h = build_hamiltonian(device, zero_volts.with_electrode(2 * n - 1, 1.0))
            delta_diag = h.diag - h0.diag
            assert np.count_nonzero(delta_diag) == 1
            assert delta_diag[n - 1] != 0.0
            np.testing.assert_array_equal(h.offdiag, h0.offdiag)
        for n in range(1, device.n_guides):
            h = build_hamiltonian(device, zero_volts.with_electrode(2 * n, 1.0))
            delta_off = h.offdiag - h0.offdiag
            assert np.count_nonzero(delta_off) == 1
            assert delta_off[n - 1] != 0.0
            np.testing.assert_array_equal(h.diag, h0.diag)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_affine_in_voltage(self, seed):
        spec = default_device()
        rng = np.random.default_rng(seed)
        v1 = rng.uniform(-5, 5, 22)
        v2 = rng.uniform(-5, 5, 22)
        h0 = build_hamiltonian(spec, VoltageConfig(np.zeros(22)))
        h1 = build_hamiltonian(spec, VoltageConfig(v1))
        h2 = build_hamiltonian(spec, VoltageConfig(v2))
        h12 = build_hamiltonian(spec, VoltageConfig(v1 + v2))
        np.testing.assert_allclose(
            h12.diag - h0.diag, (h1.diag - h0.diag) + (h2.diag - h0.diag),
            atol=1e-12,
        )
        np.testing.assert_allclose(
            h12.offdiag - h0.offdiag,
            (h1.offdiag - h0.offdiag) + (h2.offdiag - h0.offdiag),
            atol=1e-12,
        )

    def test_matrix_is_symmetric_tridiagonal(self, device, zero_volts):
        h = build_hamiltonian(device, zero_volts.with_electrode(3, 2.0))
        m = h.to_matrix()
        np.testing.assert_array_equal(m, m.T)
        assert np.count_nonzero(np.triu(m, 2)) == 0


class TestValidateVoltages:
    def test_all_zero_passes(self, device, zero_volts):
        assert validate_voltages(device, zero_volts).ok

    def test_closed_interval_boundary(self, device, zero_volts):
        report = validate_voltages(device, zero_volts.with_electrode(5, 10.0))
        assert report.ok

    def test_violation_lists_electrode(self, device, zero_volts):
        report = validate_voltages(device, zero_volts.with_electrode(7, -12.0))
        assert not report.ok
        assert report.violations == ((7, -12.0),)
        assert "electrode 7" in str(report)
