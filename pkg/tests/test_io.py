import json

import numpy as np
import pytest

from pdisc.io import (FormatError, calibration_region, mask_indices, parse_sizes, rasterize_mask,
                      read_mask_pbm, read_points_csv, read_points_json, sidecar_dict, write_mask_csv,
                      write_mask_pbm, write_points_csv, write_points_json, write_sidecar)
from pdisc.radius import ParametricRadiusField
from pdisc.sampler import generate_anisotropic


@pytest.fixture(scope="module")
def pattern():
    return generate_anisotropic(ParametricRadiusField(60), (1, 3), seed=5)


def test_mask_index_convention():
    assert mask_indices([[0.0, 0.0]], (256, 256)).tolist() == [[128, 128]]
    assert mask_indices([[-0.5, -0.5]], (256, 256)).tolist() == [[0, 0]]
    e = np.nextafter(0.5, 0)
    assert mask_indices([[e, e]], (256, 256)).tolist() == [[255, 255]]
    assert mask_indices([[0.5, 0.5]], (256, 256)).tolist() == [[255, 255]]
    assert mask_indices([[0.0]], (255,)).tolist() == [[127]]
    with pytest.raises(ValueError):
        mask_indices([[0.6, 0.0]], (256, 256))


def test_rasterize_duplicates_and_calibration():
    m = rasterize_mask(np.array([[0.0, 0.0], [0.001, 0.001], [0.3, -0.2]]), (256, 256))
    assert m.occupied == 2 and m.n_duplicates == 1 and m.n_points == 3
    c = rasterize_mask(np.array([[0.0, 0.0]]), (16, 16), calib=(4, 4))
    assert c.calib_cells == 16 and c.calib_added == 15 and c.occupied == 16
    assert c.occupancy[6:10, 6:10].all()
    assert rasterize_mask(np.empty((0, 2)), (8, 8)).occupied == 0


def test_calibration_shapes():
    assert calibration_region((9, 9), (3, 3)).sum() == 9
    assert calibration_region((9, 9), (3, 3))[4, 4]
    ell = calibration_region((64, 64), (20, 20), "ellipse")
    assert ell[32, 32] and not ell[32 + 11, 32]
    assert abs(ell.sum() - np.pi * 100) < 40
    with pytest.raises(ValueError):
        calibration_region((8, 8), (2, 2), "star")


def test_parse_sizes():
    assert parse_sizes("256x128") == (256, 128)
    assert parse_sizes("64", 3) == (64, 64, 64)
    for bad in ("0x4", "ax4", "4x4x4"):
        with pytest.raises(ValueError):
            parse_sizes(bad, 2)


def test_csv_round_trip(tmp_path, pattern):
    path = write_points_csv(pattern, tmp_path / "p.csv")
    head = path.read_text().splitlines()[0]
    assert head == "# pdisc v1, n=2, seed=5, gamma=60.0, nu=(1,3)"
    pts, header = read_points_csv(path)
    assert np.array_equal(pts, pattern.points)
    assert header["nu"] == (1.0, 3.0) and header["seed"] == 5 and header["gamma"] == 60.0


def test_csv_empty_and_errors(tmp_path, pattern):
    empty = generate_anisotropic(ParametricRadiusField(60), (1, 3), seed=5)
    empty.points = empty.points[:0]
    path = write_points_csv(empty, tmp_path / "e.csv")
    assert len(path.read_text().splitlines()) == 1
    assert read_points_csv(path)[0].shape == (0, 2)

    bad = tmp_path / "bad.csv"
    bad.write_text("# pdisc v1, n=2, seed=1, gamma=3.0, nu=(1,1)\n0.1,0.2\n0.3\n")
    with pytest.raises(FormatError) as err:
        read_points_csv(bad)
    assert err.value.lineno == 3 and "line 3" in str(err.value)
    bad.write_text("0.1,0.2\n")
    with pytest.raises(FormatError):
        read_points_csv(bad)
    bad.write_text("# pdisc v1, n=2, seed=1, gamma=3.0, nu=(1,1)\n0.1,zz\n")
    with pytest.raises(FormatError, match="line 2"):
        read_points_csv(bad)


def test_pbm_examples(tmp_path):
    m = np.zeros((4, 4), dtype=bool)
    m[2, 2] = True
    text = write_mask_pbm(m, tmp_path / "c.pbm").read_text()
    assert text.splitlines()[:2] == ["P1", "4 4"]
    assert text.count("1") - 1 == 1                      # the 1 in "P1" aside
    full = write_mask_pbm(np.ones((4, 4), bool), tmp_path / "f.pbm").read_text()
    assert "".join(full.splitlines()[2:]).count("1") == 16


def test_pbm_orientation(tmp_path):
    m = np.zeros((3, 2), dtype=bool)                     # width 3, height 2
    m[0, 1] = True                                       # x=0, highest y -> top-left pixel
    lines = write_mask_pbm(m, tmp_path / "o.pbm").read_text().splitlines()
    assert lines[1] == "3 2" and lines[2:] == ["100", "000"]


def test_pbm_round_trip_with_reference_reader(tmp_path, pattern):
    Image = pytest.importorskip("PIL.Image")
    mask = rasterize_mask(pattern, (97, 64))
    path = write_mask_pbm(mask, tmp_path / "m.pbm")
    assert np.array_equal(read_mask_pbm(path), mask.occupancy)
    img = np.array(Image.open(path))                    # PIL: True = white = 0 bit
    assert np.array_equal(~img.astype(bool), mask.occupancy.T[::-1])
    with pytest.raises(ValueError):
        write_mask_pbm(np.zeros((2, 2, 2), bool), tmp_path / "x.pbm")


def test_mask_csv_nd(tmp_path):
    occ = np.zeros((3, 4, 5), bool)
    occ[1, 2, 3] = occ[0, 0, 4] = True
    lines = write_mask_csv(occ, tmp_path / "m.csv").read_text().splitlines()
    assert lines == ["# pdisc mask v1, sizes=3x4x5", "i0,i1,i2", "0,0,4", "1,2,3"]


def test_json_round_trip_and_sidecar(tmp_path, pattern):
    path = write_points_json(pattern, tmp_path / "p.json")
    pts, meta = read_points_json(path)
    assert np.array_equal(pts, pattern.points) and meta["nu"] == [1.0, 3.0]
    mask = rasterize_mask(pattern, (256, 256))
    side = json.loads(write_sidecar(pattern, tmp_path / "p.meta.json", mask).read_text())
    for key in ("seed", "gamma", "k", "nu", "algorithm", "points", "occupied_cells",
                "acceleration_rate", "library_version"):
        assert key in side
    assert side["occupied_cells"] == mask.occupied and side["center_index"] == [128, 128]
    assert "wall_time" not in json.dumps(side)
    assert sidecar_dict(pattern, mask) == sidecar_dict(pattern, mask)
