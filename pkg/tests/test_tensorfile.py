import os
import struct

import numpy as np
import pytest

from jackmac.exceptions import TensorFileError
from jackmac.formats import BF16, FP16, INT4, MXFP8_E4M3, MXINT8, EncodedTensor, encode_tensor
from jackmac.simkernel import (
    atomic_write_text,
    dumps,
    loads,
    read_csv,
    read_tensor,
    read_values,
    write_tensor,
)


def test_header_layout():
    data = dumps(encode_tensor([[1.0, 2.0, 3.0]], BF16))

    assert data[:4] == b"JKT1"
    assert data[4] == 1
    assert data[5] == 2
    assert struct.unpack_from("<2I", data, 6) == (1, 3)
    assert data[14:16] == b"\x80\x3f"


def test_int4_packs_two_codes_per_byte():
    data = dumps(encode_tensor([1, 2, 3], INT4))

    assert data[10:] == bytes([0x21, 0x03])
    assert loads(data) == encode_tensor([1, 2, 3], INT4)


def test_fp32_round_trip(rng):
    values = rng.standard_normal((3, 5)).astype(np.float32)

    assert np.array_equal(loads(dumps(values)), values)


def test_scalar_formats_round_trip(rng):
    for fmt in (BF16, FP16, INT4):
        tensor = encode_tensor(rng.standard_normal((4, 7)), fmt)

        assert loads(dumps(tensor)) == tensor


def test_mx_round_trip_with_block_size(rng):
    tensor = encode_tensor(rng.standard_normal((2, 40)), MXINT8.with_block_size(16))
    data = dumps(tensor)

    assert len(data) == 6 + 8 + 80 + 2 * 3
    assert loads(data, block_size=16) == tensor


def test_mx_default_block_size(rng):
    tensor = encode_tensor(rng.standard_normal((3, 64)), MXFP8_E4M3)

    assert loads(dumps(tensor)) == tensor


@pytest.mark.parametrize(
    "data",
    [
        b"JKT0\x01\x01\x01\x00\x00\x00\x00\x00",
        b"JKT1",
        b"JKT1\x63\x01\x01\x00\x00\x00",
        b"JKT1\x01\x00",
        b"JKT1\x01\x02\x01\x00\x00\x00",
        b"JKT1\x01\x01\x02\x00\x00\x00\x00\x00",
    ],
)
def test_malformed_images(data):
    with pytest.raises(TensorFileError):
        loads(data)


def test_write_and_read(tmp_path, faker):
    path = tmp_path / faker.file_name(extension="jkt")
    tensor = encode_tensor([[0.5, -0.25]], BF16)

    write_tensor(path, tensor)

    assert read_tensor(path) == tensor
    assert [p.name for p in tmp_path.iterdir()] == [path.name]


def test_atomic_write_leaves_target_on_failure(tmp_path, mocker):
    path = tmp_path / "report.json"
    path.write_text("old")
    mocker.patch("jackmac.simkernel.tensorfile.os.replace", side_effect=OSError("disk full"))

    with pytest.raises(OSError):
        atomic_write_text(path, "new")

    assert path.read_text() == "old"
    assert [p.name for p in tmp_path.iterdir()] == ["report.json"]


def test_read_missing_file(tmp_path):
    with pytest.raises(TensorFileError):
        read_tensor(tmp_path / "missing.jkt")


def test_read_csv(tmp_path):
    path = tmp_path / "a.csv"
    path.write_text("1,2.5,-3\n0.125,0,4\n")

    assert read_csv(path).tolist() == [[1, 2.5, -3], [0.125, 0, 4]]


def test_read_csv_single_row(tmp_path):
    path = tmp_path / "w.csv"
    path.write_text("1,2,3\n")

    assert read_csv(path).shape == (1, 3)


def test_read_csv_rejects_text(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,two,3\n")

    with pytest.raises(TensorFileError):
        read_csv(path)


def test_read_values_accepts_fp32_tensors(tmp_path):
    path = tmp_path / "a.jkt"
    write_tensor(path, np.array([[1.0, 2.0]], dtype=np.float32))

    assert read_values(path).tolist() == [[1.0, 2.0]]


def test_read_values_rejects_codes(tmp_path):
    path = tmp_path / "a.jkt"
    write_tensor(path, encode_tensor([1.0], BF16))

    with pytest.raises(TensorFileError):
        read_values(path)


def test_encoded_tensor_needs_exponents_for_mx():
    with pytest.raises(ValueError):
        EncodedTensor(MXINT8, np.zeros((1, 32), dtype=np.uint16))
