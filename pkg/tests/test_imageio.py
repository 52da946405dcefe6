import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from eigenkmeans.imageio import (
    GrayImage,
    PGMError,
    encode_pgm,
    load_pgm,
    read_pgm,
    reshape,
    to_display_image,
    vectorize,
    write_pgm,
)


def test_p5_bytes():
    img = load_pgm(b"P5\n2 2\n255\n" + bytes([0, 128, 255, 64]))
    assert (img.width, img.height, img.maxval) == (2, 2, 255)
    assert img.pixels.ravel().tolist() == [0, 128, 255, 64]


def test_p2_ascii():
    img = load_pgm(b"P2\n1 1\n255\n7\n")
    assert img.dims == (1, 1)
    assert img.pixels.tolist() == [[7]]


def test_comments_between_tokens():
    data = b"P2\n# made by hand\n3 # width\n1\n# maxval next\n9\n1 2\n# in raster\n3\n"
    assert load_pgm(data).pixels.tolist() == [[1, 2, 3]]


def test_p5_comment_in_header():
    data = b"P5 #c\n2 1 #dims\n255\n" + bytes([10, 20])
    assert load_pgm(data).pixels.tolist() == [[10, 20]]


def test_p5_sixteen_bit_big_endian():
    img = load_pgm(b"P5\n2 1\n65535\n" + bytes([0x01, 0x02, 0xFF, 0xFF]))
    assert img.pixels.tolist() == [[0x0102, 0xFFFF]]


def test_orl_sized_frame(tmp_path):
    px = np.arange(92 * 112) % 256
    path = tmp_path / "1.pgm"
    write_pgm(path, GrayImage(92, 112, 255, px.reshape(112, 92)))
    img = read_pgm(path)
    assert img.dims == (92, 112)
    assert vectorize(img).size == 10304


@pytest.mark.parametrize(
    "data, field",
    [
        (b"P6\n1 1\n255\n\x00", "magic"),
        (b"P55\n1 1\n255\n\x00", "magic"),
        (b"", "magic"),
        (b"P5\n0 1\n255\n", "width"),
        (b"P5\n1 0\n255\n", "height"),
        (b"P5\nx 1\n255\n", "width"),
        (b"P5\n1 1\n0\n\x00", "maxval"),
        (b"P5\n1 1\n65536\n\x00\x00", "maxval"),
        (b"P5\n1 1\n", "maxval"),
        (b"P5\n2 2\n255\n\x00\x01\x02", "pixels"),
        (b"P5\n1 1\n65535\n\x00", "pixels"),
        (b"P5\n1 1\n255", "pixels"),
        (b"P2\n2 1\n255\n3\n", "pixels"),
        (b"P2\n1 1\n10\n11\n", "pixels"),
        (b"P5\n1 1\n100\n\xff", "pixels"),
    ],
)
def test_parse_errors_name_field(data, field):
    with pytest.raises(PGMError) as err:
        load_pgm(data)
    assert err.value.field == field
    assert field in str(err.value)


def test_vectorize_row_major():
    img = load_pgm(b"P5\n2 2\n255\n" + bytes([0, 128, 255, 64]))
    vec = vectorize(img)
    assert vec.dtype == np.float64
    assert vec.tolist() == [0.0, 128.0, 255.0, 64.0]
    assert vectorize(load_pgm(b"P2\n1 1\n255\n7\n")).tolist() == [7.0]


def test_vectorize_index_convention():
    px = np.arange(12).reshape(3, 4)  # height 3, width 4
    vec = vectorize(GrayImage(4, 3, 255, px))
    for r in range(3):
        for c in range(4):
            assert vec[r * 4 + c] == px[r, c]


def test_to_display_image_rescales():
    img = to_display_image(np.array([-1.0, 0.0, 1.0, 3.0]), 2, 2)
    assert img.pixels.ravel().tolist() == [0, 64, 128, 255]
    assert to_display_image(np.full(4, 5.0), 2, 2).pixels.max() == 0


def test_image_validation():
    with pytest.raises(ValueError):
        GrayImage(2, 2, 255, np.zeros((3, 2)))
    with pytest.raises(ValueError):
        GrayImage(1, 1, 10, np.array([[11]]))


images = st.integers(1, 6).flatmap(
    lambda w: st.integers(1, 6).flatmap(
        lambda h: st.sampled_from([1, 255, 256, 65535]).flatmap(
            lambda mv: st.lists(st.integers(0, mv), min_size=w * h, max_size=w * h).map(
                lambda px: GrayImage(w, h, mv, np.array(px).reshape(h, w))
            )
        )
    )
)


@given(images, st.booleans())
def test_pgm_round_trip(img, binary):
    assert load_pgm(encode_pgm(img, binary=binary)) == img


@given(images)
def test_reshape_vectorize_round_trip(img):
    vec = vectorize(img)
    back = reshape(vec, img.width, img.height, img.maxval)
    assert back == img
    np.testing.assert_array_equal(vectorize(back), vec)


@given(images, images)
def test_vectorize_injective(a, b):
    if a.dims == b.dims and not np.array_equal(a.pixels, b.pixels):
        assert not np.array_equal(vectorize(a), vectorize(b))
