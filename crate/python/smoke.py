"""Smoke test for the birkhoff extension module."""

import pathlib

import birkhoff

DATA = pathlib.Path(__file__).resolve().parent.parent / "crates" / "core" / "data"


def main():
    t6 = birkhoff.Map.from_json((DATA / "t6.json").read_text())
    assert (t6.vertex_count, t6.edge_count, t6.face_count) == (6, 12, 6)
    assert t6.genus == 1

    all_eta = t6.eulerian()
    acyclic = t6.eulerian(acyclic_only=True)
    assert len(all_eta) == 44 and len(acyclic) == 24
    assert all(t6.is_acyclic(b) for b in acyclic)

    eta = acyclic[0]
    s = t6.surface(eta)
    assert s["chi"] == -2 * t6.vertex_count
    word = t6.word(eta)
    assert len(word) == t6.vertex_count + t6.face_count
    m = t6.monodromy(eta)
    assert m["determinant"] == 1

    built = t6.construct([0, -1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0])
    assert "bits" in built
    conn = t6.flip_connectivity([0, -1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0])
    assert conn["members"] >= 1

    grid = birkhoff.Map.grid(2, 3)
    flat_eta = grid.eulerian(acyclic_only=True)[0]
    verdict = birkhoff.verify_flat_birkhoff(2, 3, flat_eta, samples=200, seed=1)
    assert verdict["bounded"] and verdict["within_bound"]

    try:
        t6.word([1] * 11)
    except ValueError:
        pass
    else:
        raise AssertionError("short coorientation accepted")

    print("smoke ok:", len(acyclic), "acyclic coorientations, chi", s["chi"])


if __name__ == "__main__":
    main()
