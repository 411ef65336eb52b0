import numpy as np
import pytest

from jackmac.datapath import jack_mac
from jackmac.exceptions import ConfigError, FormatMismatchError, ShapeMismatchError, UnsupportedModeError
from jackmac.formats import BF16, FP8_E4M3, INT8, MXINT8, decode_tensor, encode_tensor
from jackmac.oracle import reference_gemm, relative_errors
from jackmac.simkernel import (
    ArrayConfig,
    UnitKind,
    WorkloadKind,
    WorkloadSpec,
    adder_tree_depth,
    checksum,
    compare_configs,
    compare_modes,
    conv_execute,
    estimate_cycles,
    feed_cycles,
    gemm_execute,
    gemm_functional,
    im2col,
    iter_tiles,
)


def test_presets(jack, baseline):
    assert jack.unit is UnitKind.JACK
    assert (jack.rows, jack.cols) == (32, 32)
    assert baseline.unit is UnitKind.BASELINE
    assert (baseline.rows, baseline.cols) == (128, 128)


def test_unknown_preset():
    with pytest.raises(ConfigError):
        ArrayConfig.preset("tpu")


@pytest.mark.parametrize(
    "mode, grid",
    [("bf16", 128), ("fp8", 512), ("int8", 128), ("int4", 512), ("mxint8", 128), ("mxfp8", 512)],
)
def test_jack_effective_grid(jack, mode, grid):
    assert jack.effective_grid(mode) == (grid, grid)


def test_baseline_effective_grid(baseline):
    assert baseline.effective_grid("bf16") == (128, 128)
    assert baseline.effective_grid("int4") == (512, 512)


def test_baseline_does_not_run_mx(baseline):
    assert not baseline.supports("mxint8")

    with pytest.raises(UnsupportedModeError):
        estimate_cycles(WorkloadSpec.gemm(4, 4, 4, "mxint8"), baseline)


def test_config_json(jack):
    cfg = jack.with_(rows=8, memory_model=False)

    assert ArrayConfig.from_json(cfg.to_json()) == cfg


@pytest.mark.parametrize("changes", [{"rows": 0}, {"input_link_bits": 0}, {"obuf_kb": -1}])
def test_config_invariants(jack, changes):
    with pytest.raises(ConfigError):
        jack.with_(**changes)


def test_config_unknown_field():
    with pytest.raises(ConfigError):
        ArrayConfig.from_dict({"rows": 4, "lanes": 16})


def test_workload_json():
    gemm = WorkloadSpec.gemm(2, 3, 4, "bf16")
    conv = WorkloadSpec.conv(8, 8, 4, 4, 3, 3, "mxint8", stride=2, block_size=16)

    assert WorkloadSpec.from_json(gemm.to_json()) == gemm
    assert WorkloadSpec.from_json(conv.to_json()) == conv
    assert conv.to_dict()["block_size"] == 16
    assert "block_size" not in gemm.to_dict()


def test_workload_from_file_shape():
    spec = WorkloadSpec.from_dict({"kind": "GEMM", "mode": "int4", "m": 5, "n": 6, "k": 7})

    assert spec.kind is WorkloadKind.GEMM
    assert spec.gemm_shape() == (5, 6, 7)
    assert spec.macs == 210


def test_conv_lowers_to_gemm():
    spec = WorkloadSpec.conv(8, 8, 4, 16, 3, 3, "bf16")

    assert spec.output_hw == (6, 6)
    assert spec.gemm_shape() == (36, 16, 36)


@pytest.mark.parametrize(
    "data",
    [
        {"kind": "GEMM", "mode": "bf16", "m": 0, "n": 1, "k": 1},
        {"kind": "GEMM", "mode": "fp32", "m": 1, "n": 1, "k": 1},
        {"kind": "CONV", "mode": "bf16", "h": 2, "w": 2, "kh": 3, "kw": 3},
        {"kind": "MATVEC", "mode": "bf16"},
    ],
)
def test_workload_invalid(data):
    with pytest.raises(ConfigError):
        WorkloadSpec.from_dict(data)


def test_adder_tree_depth():
    assert adder_tree_depth(4) == 3
    assert adder_tree_depth(16) == 5
    assert adder_tree_depth(1) == 1


def test_feed_cycles():
    assert feed_cycles(16, 8) == 2
    assert feed_cycles(4, 8) == 1
    assert feed_cycles(8, 8) == 1


def test_tiles_cover_the_workload():
    tiles = list(iter_tiles(10, 300, 200, 128, 128, 4))

    assert len(tiles) == 6
    assert sum(t.n_len * t.k_len for t in tiles) == 300 * 200
    assert [t.k_start for t in tiles[:2]] == [0, 128]
    assert tiles[-1].unit_cols == 11


def test_single_mac(jack):
    report = estimate_cycles(WorkloadSpec.gemm(1, 1, 1, "bf16"), jack.with_(memory_model=False))

    assert report.fill_cycles == 5
    assert report.compute_cycles == 6
    assert report.total_cycles == 6
    assert report.input_feed_cycles_per_operand == 2
    assert report.tiles == 1


def test_bf16_512_cube(jack):
    report = estimate_cycles(WorkloadSpec.gemm(512, 512, 512, "bf16"), jack)

    assert report.tiles == 16
    assert report.compute_cycles == 11248
    assert report.memory_stall_cycles == 144
    assert report.total_cycles == 11392
    assert report.effective_multipliers == 128 * 128


def test_int4_512_cube(jack):
    report = estimate_cycles(WorkloadSpec.gemm(512, 512, 512, "int4"), jack)

    assert report.tiles == 1
    assert report.compute_cycles == 735
    assert report.total_cycles == 1119
    assert report.input_feed_cycles_per_operand == 1


def test_int4_over_bf16_speedup(jack):
    comparison = compare_modes(
        WorkloadSpec.gemm(512, 512, 512, "bf16"), WorkloadSpec.gemm(512, 512, 512, "int4"), jack
    )

    assert comparison.speedup == pytest.approx(10.18, abs=0.01)
    assert comparison.compute_speedup == pytest.approx(15.30, abs=0.01)
    assert comparison.multiplier_ratio == 16
    assert 1 < comparison.speedup <= comparison.multiplier_ratio


def test_speedup_approaches_multiplier_ratio(jack):
    cfg = jack.with_(memory_model=False)
    comparison = compare_modes(
        WorkloadSpec.gemm(65536, 512, 512, "bf16"), WorkloadSpec.gemm(65536, 512, 512, "int4"), cfg
    )

    assert 15.9 < comparison.compute_speedup < 16


def test_compare_identical(jack):
    spec = WorkloadSpec.gemm(64, 64, 64, "fp8")
    comparison = compare_configs(spec, jack, jack)

    assert comparison.speedup == 1.0
    assert comparison.multiplier_ratio == 1.0


def test_jack_against_baseline(jack, baseline):
    comparison = compare_configs(WorkloadSpec.gemm(256, 256, 256, "int8"), baseline, jack)

    assert comparison.label_a == "BASELINE"
    assert comparison.label_b == "JACK"
    assert comparison.multiplier_ratio == 1.0


@pytest.mark.parametrize("axis", ["m", "n", "k"])
def test_compute_cycles_monotone(jack, axis):
    cfg = jack.with_(memory_model=False)
    previous = 0

    for size in range(1, 400, 7):
        dims = {"m": 16, "n": 16, "k": 16, axis: size}
        cycles = estimate_cycles(WorkloadSpec.gemm(mode="bf16", **dims), cfg).compute_cycles

        assert cycles >= previous
        previous = cycles


def test_memory_only_adds_cycles(jack):
    spec = WorkloadSpec.gemm(300, 200, 700, "fp8")
    with_memory = estimate_cycles(spec, jack)
    without = estimate_cycles(spec, jack.with_(memory_model=False))

    assert with_memory.compute_cycles == without.compute_cycles
    assert with_memory.total_cycles > without.total_cycles
    assert without.memory_stall_cycles == 0


def test_utilization_bounded(jack):
    report = estimate_cycles(WorkloadSpec.gemm(2048, 128, 128, "bf16"), jack)

    assert 0 < report.utilization <= 1


def test_gemm_single_output(jack):
    a = encode_tensor([[1.5]], BF16)
    w = encode_tensor([[2.0]], BF16)

    c, report = gemm_execute(a, w, jack.with_(memory_model=False), "bf16")

    assert c.shape == (1, 1)
    assert decode_tensor(c)[0, 0] == 3.0
    assert report.compute_cycles == 6
    assert report.result_checksum == checksum(c)


def test_timing_ignores_values(rng, jack):
    reports = set()
    for _ in range(20):
        m, n, k = (int(v) for v in rng.integers(1, 9, size=3))
        a = encode_tensor(rng.standard_normal((m, k)), BF16)
        w = encode_tensor(rng.standard_normal((n, k)), BF16)

        c, report = gemm_execute(a, w, jack, "bf16")
        expected = estimate_cycles(WorkloadSpec.gemm(m, n, k, "bf16"), jack)

        assert report.total_cycles == expected.total_cycles
        assert c == gemm_functional(a, w, "bf16")
        reports.add(report.result_checksum)

    assert len(reports) > 1


def test_results_do_not_depend_on_array_size(rng, jack):
    a = encode_tensor(rng.standard_normal((6, 40)), MXINT8)
    w = encode_tensor(rng.standard_normal((5, 40)), MXINT8)

    big, _ = gemm_execute(a, w, jack, "mxint8")
    small, _ = gemm_execute(a, w, jack.with_(rows=1, cols=1), "mxint8")

    assert big == small


def test_gemm_chains_through_the_unit(rng):
    a = encode_tensor(rng.standard_normal((2, 8)), BF16)
    w = encode_tensor(rng.standard_normal((3, 8)), BF16)
    c = gemm_functional(a, w, "bf16")

    for i in range(2):
        for j in range(3):
            acc = None
            for start in (0, 4):
                acc = jack_mac("bf16", a.row_codes(i)[start : start + 4], w.row_codes(j)[start : start + 4], acc).output

            assert c.code(i, j) == acc


def test_chained_accumulation_against_wide(rng):
    a = rng.standard_normal((64, 64))
    w = rng.standard_normal((64, 64))
    ea, ew = encode_tensor(a, BF16), encode_tensor(w, BF16)
    reference = reference_gemm(a, w, "bf16")

    chained = relative_errors(decode_tensor(gemm_functional(ea, ew, "bf16")), reference)
    wide = relative_errors(decode_tensor(gemm_functional(ea, ew, "bf16", wide_accumulation=True)), reference)

    # every chained step truncates to FP16, so only the median is bounded
    assert chained.count == wide.count > 0
    assert wide.median < 0.002
    assert wide.max < 0.01
    assert wide.median <= chained.median < 0.01
    assert wide.max <= chained.max


def test_convnext_t_second_layer_shape(rng, jack):
    full = WorkloadSpec.conv(56, 56, 96, 96, 7, 7, "bf16")

    assert full.output_hw == (50, 50)
    assert full.gemm_shape() == (2500, 96, 7 * 7 * 96)
    assert estimate_cycles(full, jack).compute_cycles > 0

    x = encode_tensor(rng.standard_normal((56, 56, 4)), FP8_E4M3)
    w = encode_tensor(rng.standard_normal((1, 7, 7, 4)), FP8_E4M3)

    y, report = conv_execute(x, w, jack, "fp8")

    assert y.shape == (50, 50, 1)
    assert report.macs == 2500 * 7 * 7 * 4
    assert report.total_cycles == estimate_cycles(WorkloadSpec.conv(56, 56, 4, 1, 7, 7, "fp8"), jack).total_cycles
    assert report.result_checksum == checksum(y)
    assert np.all(np.isfinite(decode_tensor(y)))


def test_conv_estimates_cycles_once(mocker, rng, jack):
    spy = mocker.patch("jackmac.simkernel.execute.estimate_cycles", wraps=estimate_cycles)
    x = encode_tensor(rng.integers(-4, 4, size=(5, 5, 4)), INT8)
    w = encode_tensor(rng.integers(-4, 4, size=(2, 3, 3, 4)), INT8)

    _, report = conv_execute(x, w, jack, "int8", stride=2)

    spy.assert_called_once()
    assert spy.call_args.args[0].kind is WorkloadKind.CONV
    assert report.macs == 4 * 2 * 36


def test_gemm_format_mismatch(jack):
    a = encode_tensor([[1.0]], INT8)

    with pytest.raises(FormatMismatchError):
        gemm_execute(a, a, jack, "bf16")


def test_gemm_inner_dimension_mismatch(jack):
    with pytest.raises(ShapeMismatchError):
        gemm_execute(encode_tensor(np.ones((2, 3)), BF16), encode_tensor(np.ones((2, 4)), BF16), jack, "bf16")


def test_im2col_order():
    x = encode_tensor(np.arange(2 * 2 * 2).reshape(2, 2, 2), INT8)
    rows = im2col(x, 2, 2)

    assert rows.shape == (1, 8)
    assert decode_tensor(rows)[0].tolist() == list(range(8))


def test_conv_one_by_one_is_gemm(rng, jack):
    x = encode_tensor(rng.integers(-8, 8, size=(4, 4, 8)), INT8)
    w = encode_tensor(rng.integers(-8, 8, size=(3, 1, 1, 8)), INT8)

    y, _ = conv_execute(x, w, jack, "int8")
    c = gemm_functional(
        encode_tensor(decode_tensor(x).reshape(16, 8), INT8),
        encode_tensor(decode_tensor(w).reshape(3, 8), INT8),
        "int8",
    )

    assert y.shape == (4, 4, 3)
    assert np.array_equal(y.codes.reshape(16, 3), c.codes)


def test_conv_matches_nested_loops(rng, jack):
    x = encode_tensor(rng.standard_normal((8, 8, 4)), BF16)
    w = encode_tensor(rng.standard_normal((4, 3, 3, 4)), BF16)

    y, report = conv_execute(x, w, jack, "bf16")

    assert y.shape == (6, 6, 4)
    assert report.macs == 36 * 4 * 36

    for oy in range(6):
        for ox in range(6):
            for co in range(4):
                acc = None
                for dy in range(3):
                    for dx in range(3):
                        acc = jack_mac("bf16", x.row_codes(oy + dy, ox + dx), w.row_codes(co, dy, dx), acc).output

                assert y.code(oy, ox, co) == acc


def test_conv_stride(rng, jack):
    x = encode_tensor(rng.standard_normal((7, 7, 4)), BF16)
    w = encode_tensor(rng.standard_normal((2, 3, 3, 4)), BF16)

    y, _ = conv_execute(x, w, jack, "bf16", stride=2)

    assert y.shape == (3, 3, 2)


def test_conv_mx_channels_must_fill_blocks(rng, jack):
    x = encode_tensor(rng.standard_normal((4, 4, 8)), MXINT8)
    w = encode_tensor(rng.standard_normal((2, 1, 1, 8)), MXINT8)

    with pytest.raises(ShapeMismatchError):
        conv_execute(x, w, jack, "mxint8")


def test_conv_channel_mismatch(jack):
    x = encode_tensor(np.ones((4, 4, 4)), BF16)
    w = encode_tensor(np.ones((2, 1, 1, 8)), BF16)

    with pytest.raises(ShapeMismatchError):
        conv_execute(x, w, jack, "bf16")


def test_checksum():
    one = encode_tensor([[1.0, 2.0]], BF16)
    other = encode_tensor([[1.0, 3.0]], BF16)

    assert checksum(one) == checksum(encode_tensor([[1.0, 2.0]], BF16))
    assert checksum(one) != checksum(other)
    assert len(checksum(one)) == 16


def test_compute_cycles_shrink_with_the_array(jack):
    spec = WorkloadSpec.gemm(64, 700, 900, "fp8")
    previous = None

    for size in range(4, 48, 3):
        cycles = estimate_cycles(spec, jack.with_(rows=size, cols=size, memory_model=False)).compute_cycles

        assert previous is None or cycles <= previous
        previous = cycles


def test_total_cycles_shrink_with_bandwidth(jack):
    spec = WorkloadSpec.gemm(1024, 512, 512, "bf16")
    totals = [
        estimate_cycles(spec, jack.with_(bandwidth_bytes_per_cycle=bw)).total_cycles for bw in (64, 256, 1024, 4096)
    ]

    assert totals == sorted(totals, reverse=True)
