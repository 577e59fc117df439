import math

import numpy as np
import pytest
from scipy import stats as scipy_stats

from curvecaptcha.background import (
    DEFAULT_SLOTS,
    GlyphTile,
    GridLayout,
    build_synthetic_database,
    compose_grid,
    gen_glyph_tile,
    layout_count,
    layout_for_canvas,
    load_tile_directory,
    select_tiles,
)
from curvecaptcha.curve import CanvasSpec
from curvecaptcha.raster import BLANK, INK, ink_fraction


@pytest.fixture(scope="module")
def db():
    return build_synthetic_database(np.random.default_rng(2024))


class TestGenGlyphTile:
    def test_monochrome_and_ink_bounds(self):
        tile = gen_glyph_tile(np.random.default_rng(1), 240, 200, 4)
        assert tile.bitmap.shape == (200, 240)
        assert set(np.unique(tile.bitmap)) <= {INK, BLANK}
        assert 0.02 <= ink_fraction(tile.bitmap) <= 0.25

    def test_determinism(self):
        a = gen_glyph_tile(np.random.default_rng(99), 240, 200, 4)
        b = gen_glyph_tile(np.random.default_rng(99), 240, 200, 4)
        assert a.bitmap.tobytes() == b.bitmap.tobytes()
        assert a.stroke_lengths == b.stroke_lengths

    def test_dims_too_small(self):
        with pytest.raises(ValueError):
            gen_glyph_tile(np.random.default_rng(0), 16, 200, 4)

    def test_fragment_count(self):
        for seed in range(20):
            tile = gen_glyph_tile(np.random.default_rng(seed), 240, 200, 4)
            assert 2 <= len(tile.stroke_lengths) <= 4

    def test_ink_fraction_monte_carlo(self):
        # Pixel-count oracle over many seeds.
        for seed in range(300):
            tile = gen_glyph_tile(np.random.default_rng(seed), 240, 200, 4)
            frac = ink_fraction(tile.bitmap)
            assert 0.02 <= frac <= 0.25, f"seed {seed}: ink fraction {frac}"


class TestSelectTiles:
    def test_without_replacement(self, db):
        tiles = select_tiles(np.random.default_rng(5), db, 8)
        ids = [t.tile_id for t in tiles]
        assert len(ids) == 8
        assert len(set(ids)) == 8

    def test_exhaustive_selection_is_permutation(self, db):
        tiles = select_tiles(np.random.default_rng(6), db, len(db))
        assert sorted(t.tile_id for t in tiles) == sorted(t.tile_id for t in db.tiles)

    def test_too_many_slots(self, db):
        with pytest.raises(ValueError):
            select_tiles(np.random.default_rng(7), db, len(db) + 1)

    def test_position_uniformity_chi_square(self):
        # Frequency oracle: each grid position's marginal over 10 tiles should
        # be uniform; scipy's chi-square is the reference test.
        db10 = build_synthetic_database(np.random.default_rng(77), size=10)
        rng = np.random.default_rng(8)
        draws = 50_000
        counts = np.zeros((8, 10), dtype=int)
        index = {t.tile_id: i for i, t in enumerate(db10.tiles)}
        for _ in range(draws):
            for pos, tile in enumerate(select_tiles(rng, db10, 8)):
                counts[pos, index[tile.tile_id]] += 1
        for pos in range(8):
            stat, p = scipy_stats.chisquare(counts[pos])
            assert p >= 0.001, f"position {pos} non-uniform: chi2={stat:.1f} p={p:.2e}"


class TestComposeGrid:
    def test_dimension_arithmetic(self, db):
        tiles = select_tiles(np.random.default_rng(9), db, 8)
        layout = GridLayout(rows=2, cols=4, tile_width=240, tile_height=200)
        grid = compose_grid(tiles, layout)
        assert grid.shape == (400, 960)

    def test_copy_semantics(self, db):
        tiles = select_tiles(np.random.default_rng(10), db, 8)
        layout = GridLayout(rows=4, cols=2, tile_width=240, tile_height=200)
        grid = compose_grid(tiles, layout)
        for i, tile in enumerate(tiles):
            r, c = divmod(i, layout.cols)
            block = grid[r * 200 : (r + 1) * 200, c * 240 : (c + 1) * 240]
            assert np.array_equal(block, tile.bitmap)

    def test_determinism(self, db):
        tiles = select_tiles(np.random.default_rng(11), db, 8)
        layout = GridLayout(rows=4, cols=2, tile_width=240, tile_height=200)
        assert compose_grid(tiles, layout).tobytes() == compose_grid(tiles, layout).tobytes()

    def test_count_mismatch(self, db):
        layout = GridLayout(rows=4, cols=2, tile_width=240, tile_height=200)
        with pytest.raises(ValueError):
            compose_grid(list(db.tiles[:5]), layout)

    def test_injective_over_selections(self, db):
        layout = GridLayout(rows=4, cols=2, tile_width=240, tile_height=200)
        rng = np.random.default_rng(12)
        seen = {}
        for _ in range(40):
            tiles = select_tiles(rng, db, 8)
            key = tuple(t.tile_id for t in tiles)
            digest = compose_grid(tiles, layout).tobytes()
            if key in seen:
                assert seen[key] == digest
            for other_key, other_digest in seen.items():
                if other_key != key:
                    assert other_digest != digest
            seen[key] = digest


class TestLayoutCount:
    def test_ten_tiles_eight_slots(self):
        assert layout_count(10, 8) == 1_814_400

    def test_permutations_of_three(self):
        assert layout_count(3, 3) == 6

    def test_twelve_choose_eight_ordered(self):
        # 12!/4! via the factorial oracle.
        assert layout_count(12, 8) == math.factorial(12) // math.factorial(4)
        assert layout_count(12, 8) == 19_958_400

    def test_recurrence(self):
        for n in range(1, 13):
            for k in range(1, n + 1):
                assert layout_count(n, k) == n * layout_count(n - 1, k - 1)

    def test_invalid(self):
        with pytest.raises(ValueError):
            layout_count(5, 6)


class TestLayoutForCanvas:
    def test_default_portrait(self):
        layout = layout_for_canvas(CanvasSpec(480, 800))
        assert (layout.rows, layout.cols) == (4, 2)
        assert (layout.tile_width, layout.tile_height) == (240, 200)
        assert layout.slots == DEFAULT_SLOTS

    def test_landscape(self):
        layout = layout_for_canvas(CanvasSpec(800, 480))
        assert (layout.rows, layout.cols) == (2, 4)

    def test_indivisible_canvas(self):
        with pytest.raises(ValueError):
            layout_for_canvas(CanvasSpec(481, 800))


class TestTileDirectoryLoader:
    def test_roundtrip(self, db, tmp_path):
        from PIL import Image

        for tile in db.tiles[:4]:
            Image.fromarray(tile.bitmap, mode="L").save(tmp_path / f"{tile.tile_id}.png")
        loaded = load_tile_directory(tmp_path, stroke_width=4)
        assert len(loaded) == 4
        for orig, got in zip(db.tiles[:4], loaded.tiles):
            assert np.array_equal(orig.bitmap, got.bitmap)

    def test_rejects_non_monochrome(self, tmp_path):
        from PIL import Image

        arr = np.full((200, 240), 128, dtype=np.uint8)
        Image.fromarray(arr, mode="L").save(tmp_path / "gray.png")
        with pytest.raises(ValueError, match="monochrome"):
            load_tile_directory(tmp_path)

    def test_rejects_mixed_sizes(self, db, tmp_path):
        from PIL import Image

        Image.fromarray(db.tiles[0].bitmap, mode="L").save(tmp_path / "a.png")
        Image.fromarray(db.tiles[1].bitmap[:100, :120], mode="L").save(tmp_path / "b.png")
        with pytest.raises(ValueError):
            load_tile_directory(tmp_path)

    def test_empty_directory(self, tmp_path):
        with pytest.raises(ValueError):
            load_tile_directory(tmp_path)


class TestGlyphTileValidation:
    def test_rejects_bad_ink_fraction(self):
        blank = np.full((200, 240), BLANK, dtype=np.uint8)
        with pytest.raises(ValueError, match="ink fraction"):
            GlyphTile(bitmap=blank, stroke_width=4, tile_id="x", stroke_lengths=(10.0,))
