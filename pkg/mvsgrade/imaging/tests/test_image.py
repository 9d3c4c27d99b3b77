import numpy as np
import pytest
from PIL import Image

from mvsgrade.constants import LUMA_WEIGHTS
from mvsgrade.imaging.image import RgbImage, ImageDecodeError, load_image, \
    save_image, save_mask_pgm, to_grayscale
from mvsgrade.imaging.foreground import ForegroundMask


def _write(path, array):
    Image.fromarray(np.asarray(array, dtype=np.uint8)).save(str(path))
    return path


def test_single_red_pixel(tmp_path):
    path = _write(tmp_path / 'red.png', [[[255, 0, 0]]])
    img = load_image(path)
    assert img == RgbImage.from_rows(1, 1, [(255, 0, 0)])
    assert (img.width, img.height) == (1, 1)


def test_checkerboard_ppm_bytes(tmp_path):
    # P6 header then row-major RGB triples
    body = bytes([255, 255, 255, 0, 0, 0,
                  0, 0, 0, 255, 255, 255])
    path = tmp_path / 'board.ppm'
    path.write_bytes(b'P6\n2 2\n255\n' + body)
    img = load_image(path)
    expected = RgbImage.from_rows(2, 2, [(255, 255, 255), (0, 0, 0),
                                         (0, 0, 0), (255, 255, 255)])
    assert img == expected


def test_png_round_trip_is_lossless(tmp_path):
    rng = np.random.default_rng(3)
    img = RgbImage(rng.integers(0, 256, size=(7, 5, 3)))
    save_image(img, tmp_path / 'noise.png')
    assert load_image(tmp_path / 'noise.png') == img


def test_truncated_file(tmp_path):
    path = _write(tmp_path / 'full.png', np.zeros((20, 20, 3)))
    data = path.read_bytes()
    broken = tmp_path / 'broken.png'
    broken.write_bytes(data[:len(data) // 2])
    with pytest.raises(ImageDecodeError):
        load_image(broken)


def test_unreadable_and_unsupported(tmp_path):
    with pytest.raises(ImageDecodeError):
        load_image(tmp_path / 'missing.png')
    garbage = tmp_path / 'notes.png'
    garbage.write_text('not an image')
    with pytest.raises(ImageDecodeError):
        load_image(garbage)
    gif = tmp_path / 'anim.gif'
    Image.new('RGB', (4, 4)).save(str(gif))
    with pytest.raises(ImageDecodeError) as info:
        load_image(gif)
    assert 'unsupported' in str(info.value)


def test_image_is_read_only():
    source = np.zeros((2, 2, 3), dtype=np.uint8)
    img = RgbImage(source)
    source[0, 0] = 9
    assert img.pixels[0, 0, 0] == 0
    with pytest.raises(ValueError):
        img.pixels[0, 0, 0] = 1


def test_grayscale_values():
    black = RgbImage(np.zeros((3, 4, 3), dtype=np.uint8))
    assert not to_grayscale(black).pixels.any()
    assert to_grayscale(black).pixels.shape == (3, 4)

    white = RgbImage.from_rows(1, 1, [(255, 255, 255)])
    assert to_grayscale(white).pixels[0, 0] == 255

    red = RgbImage.from_rows(1, 1, [(255, 0, 0)])
    assert to_grayscale(red).pixels[0, 0] == \
        int(np.floor(LUMA_WEIGHTS[0] * 255 + 0.5)) == 76


def test_mask_dump_is_binary_pgm(tmp_path):
    member = np.zeros((3, 4), dtype=bool)
    member[1, 2] = True
    path = tmp_path / 'mask.pgm'
    save_mask_pgm(ForegroundMask(member), path)
    assert path.read_bytes().startswith(b'P5')
    with Image.open(str(path)) as img:
        data = np.array(img)
    assert data[1, 2] == 255 and data.sum() == 255
