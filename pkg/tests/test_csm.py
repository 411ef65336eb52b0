import pytest

from hypothesis import given, strategies as st

from jackmac.csm import (
    SIGNED,
    SUB_MUL_CONFIGS,
    UNSIGNED,
    CsmStructure,
    Grouping,
    MacDesign,
    Precision,
    SubMulConfig,
    csm_multiply,
    decompose8,
    fuse8x8,
    inventory,
    multiply8,
    structure_report,
    submul4,
)
from jackmac.exceptions import ConfigError, LaneMismatchError, UnrepresentableError


def _as_int(pattern: int, bits: int, signed: bool) -> int:
    if signed and pattern & (1 << (bits - 1)):
        return pattern - (1 << bits)

    return pattern


def test_submul_unsigned_maximum():
    assert submul4(0xF, 0xF, UNSIGNED) == 225


def test_submul_signed_minimum():
    assert submul4(0x8, 0x8, SIGNED) == 64


@pytest.mark.parametrize("cfg", SUB_MUL_CONFIGS)
def test_submul_exhaustive(cfg):
    for a in range(16):
        for b in range(16):
            expected = _as_int(a, 4, cfg.a_signed) * _as_int(b, 4, cfg.b_signed)

            assert submul4(a, b, cfg) == expected


def test_multiply8_examples():
    assert multiply8(0xFF, 0xFF, UNSIGNED) == 65025
    assert multiply8(0x80, 0x80, SIGNED) == 16384
    assert multiply8(0xFF, 0x02, SIGNED) == -2


@given(st.integers(0, 0xFF), st.integers(0, 0xFF), st.sampled_from(SUB_MUL_CONFIGS))
def test_fusion_matches_full_multiply(a, b, cfg):
    expected = _as_int(a, 8, cfg.a_signed) * _as_int(b, 8, cfg.b_signed)

    assert multiply8(a, b, cfg) == expected


def test_decompose_keeps_low_nibbles_unsigned():
    # -1 = 0xFF: low nibble 15 unsigned, high nibble -1 signed
    ll, lh, hl, hh = decompose8(0xFF, 0x01, SIGNED)

    assert (ll, lh, hl, hh) == (15, 0, -1, 0)


def test_csm_multiply_fused():
    assert csm_multiply(3, 4, Precision.BIT8, SIGNED) == (12,)


def test_csm_multiply_four_lanes():
    assert csm_multiply([3, 4, 7, 2], [4, 5, 4, 4], Precision.BIT4) == (12, 20, 28, 8)


def test_csm_multiply_packed_lanes():
    # lane 0 in the low nibble
    assert csm_multiply(0x2743, 0x4454, Precision.BIT4) == (12, 20, 28, 8)


def test_csm_multiply_per_lane_configs():
    configs = [UNSIGNED, SIGNED, SubMulConfig(True, False), SubMulConfig(False, True)]

    assert csm_multiply([0xF] * 4, [0x2] * 4, Precision.BIT4, configs) == (30, -2, -2, 30)


def test_csm_multiply_fused_rejects_lane_configs():
    with pytest.raises(LaneMismatchError):
        csm_multiply(1, 1, Precision.BIT8, [SIGNED] * 4)


def test_csm_multiply_lane_count():
    with pytest.raises(LaneMismatchError):
        csm_multiply([1, 2, 3], [1, 2, 3], Precision.BIT4)

    with pytest.raises(LaneMismatchError):
        csm_multiply([1] * 4, [1] * 4, Precision.BIT4, [SIGNED] * 3)


def test_structure_ungrouped():
    report = structure_report(Grouping.UNGROUPED, 16)

    assert report.sub_multiplier_count == 16
    assert report.shifter_count == 16


def test_structure_grouped_shares_shifters():
    ungrouped = structure_report("UNGROUPED", 16)
    grouped = structure_report("GROUPED_2D", 16)

    assert grouped.sub_multiplier_count == 16
    assert grouped.shifter_count == 4
    assert grouped.shifter_count / ungrouped.shifter_count == 0.25


def test_structure_shifter_width_follows_lanes():
    assert structure_report(Grouping.GROUPED_2D, 4).shifter_width == 522
    assert structure_report(Grouping.GROUPED_2D, 16).shifter_width == 34


@pytest.mark.parametrize("lanes", [0, 8, 32])
def test_structure_invalid_lanes(lanes):
    with pytest.raises(LaneMismatchError):
        structure_report(Grouping.GROUPED_2D, lanes)


def test_structure_json():
    report = structure_report(Grouping.UNGROUPED, 4)

    assert CsmStructure.from_json(report.to_json()) == report
    assert report.to_dict()["grouping"] == "UNGROUPED"


@pytest.mark.parametrize(
    "design, sub_multipliers, shifters, fp_tree",
    [
        (MacDesign.DEDICATED, 0, 0, True),
        (MacDesign.SCALABLE, 16, 0, True),
        (MacDesign.IN_CSM_SHIFT, 16, 16, False),
        (MacDesign.JACK, 16, 4, False),
    ],
)
def test_inventory(design, sub_multipliers, shifters, fp_tree):
    inv = inventory(design.value)

    assert inv.sub_multipliers == sub_multipliers
    assert inv.barrel_shifters == shifters
    assert inv.fp_adder_tree is fp_tree


def test_inventory_dedicated_counts():
    assert inventory(MacDesign.DEDICATED).dedicated_multipliers == {
        "bf16": 4,
        "fp8_e4m3": 16,
        "int8": 4,
        "int4": 16,
    }


def test_inventory_unknown_design():
    with pytest.raises(ConfigError):
        inventory("SYSTOLIC")


def test_inventory_fields_distinguish_designs():
    payloads = [inventory(design).to_dict() for design in MacDesign]

    for key in payloads[0]:
        if key != "design":
            assert len({repr(p[key]) for p in payloads}) > 1


def test_fuse_checks_sub_products_against_config():
    assert fuse8x8(0, 0, 0, 64, SIGNED) == 64 << 8
    assert fuse8x8(225, 225, 225, 225, UNSIGNED) == 255 * 255

    with pytest.raises(UnrepresentableError):
        fuse8x8(0, 0, 0, -64, SIGNED)

    with pytest.raises(UnrepresentableError):
        fuse8x8(0, -1, 0, 0, UNSIGNED)

    with pytest.raises(UnrepresentableError):
        fuse8x8(226, 0, 0, 0, SIGNED)


def test_fuse_without_config_skips_checks():
    assert fuse8x8(0, -1, 0, 0) == -16
