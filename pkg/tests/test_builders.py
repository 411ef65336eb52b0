import numpy as np
import pytest

from jackmac import JackUnit, MacBuilder, WorkloadBuilder
from jackmac.csm import Grouping, MacDesign
from jackmac.datapath import Mode, ModeName, Submodule
from jackmac.exceptions import ConfigError, FormatMismatchError, LaneMismatchError
from jackmac.formats import BF16, FP16, INT16, BlockSlice, FormatDescriptor, ScalarCode, encode, encode_tensor
from jackmac.simkernel import ArrayConfig, UnitKind


def test_mac_builder_chains():
    builder = MacBuilder("bf16")

    assert builder.x(1, 2, 3, 4) is builder
    assert builder.w(1, 1, 1, 1) is builder
    assert builder.acc(0.5) is builder
    assert builder.grouped(False) is builder


def test_mac_builder_run():
    result = MacBuilder("bf16").x(1, 2, 3, 4).w(0.5, 0.5, 0.5, 0.5).acc(1).run()

    assert result.value == 6.0
    assert result.output == encode(6, FP16)


def test_mac_builder_matches_expected(rng):
    values = rng.standard_normal(16).tolist()
    builder = MacBuilder("fp8").x(*values).w(*reversed(values)).acc(-0.75)

    assert builder.run().output == builder.expected()
    assert builder.grouped(False).run().output == builder.expected()


def test_mac_builder_codes():
    codes = [encode(v, BF16) for v in (1.0, 1.0, 0.0, 0.0)]

    assert MacBuilder("bf16").x(*codes).w(*codes).run().value == 2.0


def test_mac_builder_rejects_foreign_codes():
    with pytest.raises(FormatMismatchError):
        MacBuilder("fp8").x(*[encode(1.0, BF16)] * 16)


def test_mac_builder_needs_both_operands():
    with pytest.raises(FormatMismatchError):
        MacBuilder("int8").x(1, 2, 3, 4).run()


def test_mac_builder_lane_count():
    with pytest.raises(LaneMismatchError):
        MacBuilder("int8").x(1, 2, 3).w(1, 2, 3).run()


def test_mac_builder_int_partial_sum():
    result = MacBuilder("int4").x(*[1] * 16).w(*[-2] * 16).acc_bits(0x0010).run()

    assert result.output.as_signed == -16


def test_mac_builder_mx_bits():
    result = MacBuilder("mxint8").x_bits(0x20, shared_exponent=1).w_bits(0x20).run()

    # 0.5 * 2^1 * 0.5
    assert result.value == 0.5
    assert result.mode.block_size == 32


def test_mac_builder_mx_values():
    builder = MacBuilder("mxint8").x(0.5, 0.25).w(0.5, 4)
    x, _ = builder.operands()

    assert isinstance(x, BlockSlice)
    assert len(x) == 2
    assert builder.run().value == 1.25


def test_mac_builder_block_size():
    builder = MacBuilder("mxint4").block_size(8)

    assert builder.get_mode() == Mode.of("mxint4", 8)
    assert builder.x(1, 2).operands()[0].format == FormatDescriptor.preset("mxint4", 8)


def test_block_size_needs_mx_mode():
    with pytest.raises(FormatMismatchError):
        MacBuilder("bf16").block_size(16)


def test_workload_builder_estimate():
    report = WorkloadBuilder("bf16").gemm(1, 1, 1).with_memory(False).estimate()

    assert report.total_cycles == 6
    assert report.mode == "bf16"


def test_workload_builder_needs_a_kind():
    with pytest.raises(ConfigError):
        WorkloadBuilder("bf16").estimate()


def test_workload_builder_compare():
    comparison = WorkloadBuilder("bf16").gemm(512, 512, 512).compare("int4")

    assert comparison.label_a == "bf16"
    assert comparison.label_b == "int4"
    assert comparison.speedup == pytest.approx(10.18, abs=0.01)


def test_workload_builder_against_baseline():
    comparison = WorkloadBuilder("int4").gemm(256, 256, 256).on("baseline").against("jack")

    assert comparison.label_a == "BASELINE"
    assert comparison.label_b == "JACK"


def test_workload_builder_config():
    builder = WorkloadBuilder("fp8").on(ArrayConfig(rows=4, cols=4)).wide()

    assert builder.get_config().rows == 4
    assert builder.get_config().wide_accumulation
    assert builder.get_config().unit is UnitKind.JACK


def test_workload_builder_conv_spec():
    spec = WorkloadBuilder("mxint8").block_size(16).conv(8, 8, 16, 4, 3, 3, stride=2).spec()

    assert spec.output_hw == (3, 3)
    assert spec.block_size == 16
    assert spec.mode_of() == Mode.of("mxint8", 16)


def test_workload_builder_execute_gemm(rng):
    a = rng.standard_normal((3, 8))
    w = rng.standard_normal((2, 8))

    c, report = WorkloadBuilder("bf16").gemm(3, 2, 8).execute(a, w)

    assert c.shape == (3, 2)
    assert c.format == FP16
    assert report.macs == 48
    assert report.result_checksum is not None


def test_workload_builder_execute_conv(rng):
    x = encode_tensor(rng.standard_normal((5, 5, 4)), BF16)
    w = encode_tensor(rng.standard_normal((2, 3, 3, 4)), BF16)

    y, _ = WorkloadBuilder("bf16").conv(5, 5, 4, 2, 3, 3, stride=2).execute(x, w)

    assert y.shape == (2, 2, 2)


def test_jack_unit_facade():
    assert JackUnit.mode("mxfp8", 16) == Mode.of(ModeName.MXFP8, 16)
    assert Submodule.CSM in JackUnit.activation("int8")
    assert isinstance(JackUnit.mac("int8"), MacBuilder)
    assert JackUnit.gemm("int8", 4, 4, 4).spec().macs == 64
    assert JackUnit.conv("int8", 4, 4, 4, 4, 1, 1).spec().gemm_shape() == (16, 4, 4)


def test_jack_unit_hardware_reports():
    assert JackUnit.structure().shifter_count == 4
    assert JackUnit.structure(Grouping.UNGROUPED, 4).shifter_count == 16
    assert JackUnit.inventory(MacDesign.SCALABLE).fp_adder_tree


def test_jack_unit_mac_end_to_end():
    result = JackUnit.mac("int8").x(10, 20, 30, 40).w(1, 2, 3, 4).run()

    assert result.output == ScalarCode(INT16, 300)
    assert result.active_submodules.direct_output
    assert np.isclose(result.value, 300)
