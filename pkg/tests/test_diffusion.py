import numpy as np
import pytest

from oracles import random_diffusion_instance, ray_offsets, simulate_diffusion_stage
from skinseg import diffusion as df
from skinseg.colorspace import Channel
from skinseg.otsuseg import ChannelClassMaps


def class_maps(labels):
    n = labels.shape[0]
    return ChannelClassMaps(channels=(Channel.CB,) * n, k=3,
                            maps=labels, thresholds=((0, 1),) * n)


def uniform_instance(h=9, w=9, n_channels=1):
    tern = np.full((h, w), 128, dtype=np.uint8)
    labels = np.zeros((n_channels, h, w), dtype=np.uint8)
    edges = np.zeros((h, w), dtype=bool)
    return tern, labels, edges


def test_ray_angle_set():
    assert len(df.RAY_ANGLES) == 36
    assert df.RAY_ANGLES[:3] == (0, 10, 20)
    assert all(b - a == 10 for a, b in zip(df.RAY_ANGLES, df.RAY_ANGLES[1:]))


def test_ray_pixels_axis_aligned():
    assert df.ray_pixels((5, 5), 0, (10, 10)) == [(6, 5), (7, 5), (8, 5), (9, 5)]
    assert df.ray_pixels((5, 5), 90, (10, 10)) == [(5, 4), (5, 3), (5, 2), (5, 1), (5, 0)]
    assert df.ray_pixels((5, 5), 180, (10, 10)) == [(4, 5), (3, 5), (2, 5), (1, 5), (0, 5)]
    assert df.ray_pixels((5, 5), 270, (10, 10)) == [(5, 6), (5, 7), (5, 8), (5, 9)]


def test_ray_pixels_diagonal():
    assert df.ray_pixels((0, 9), 45, (10, 10)) == [(i, 9 - i) for i in range(1, 10)]


def test_ray_pixels_max_len():
    assert df.ray_pixels((0, 0), 0, (100, 100), max_len=3) == [(1, 0), (2, 0), (3, 0)]


def test_ray_pixels_matches_documented_offsets():
    for angle in df.RAY_ANGLES:
        got = df.ray_pixels((20, 20), angle, (41, 41))
        want = []
        for dx, dy in ray_offsets(angle, 41):
            x, y = 20 + dx, 20 + dy
            if not (0 <= x < 41 and 0 <= y < 41):
                break
            want.append((x, y))
        assert got == want, f"angle {angle}"


def test_diffusion_score_examples():
    cfg = df.DiffusionConfig(channel_weights=(2, 2, 1, 1, 1, 1, 1), w_gray=2.0, w_black=0.0)
    same = [0] * 7
    assert df.diffusion_score(128, same, same, 3, cfg) == 11.0
    # black UTP, w_black=0, labels maximally apart
    assert df.diffusion_score(0, [0] * 7, [2] * 7, 3, cfg) == 0.0
    # gray, |delta|=1 on the two weight-2 channels
    utp = [1, 1, 0, 0, 0, 0, 0]
    assert df.diffusion_score(128, same, utp, 3, cfg) == 9.0


def test_diffusion_score_white_gets_no_bonus():
    cfg = df.DiffusionConfig(channel_weights=(1.0,), w_gray=2.0, w_black=0.5)
    assert df.diffusion_score(255, [0], [0], 3, cfg) == 1.0


def test_diffusion_score_rejects_mismatched_lengths():
    cfg = df.DiffusionConfig(channel_weights=(1.0, 1.0))
    with pytest.raises(ValueError):
        df.diffusion_score(128, [0], [0, 1], 3, cfg)


def test_empty_seed_stays_empty():
    tern, labels, edges = uniform_instance()
    cfg = df.DiffusionConfig(channel_weights=(1.0,), s_min=0.0)
    out = df.diffuse(np.zeros((9, 9), bool), tern, class_maps(labels), edges, cfg)
    assert out.sum() == 0


def test_edge_enclosed_seed_unchanged():
    tern, labels, edges = uniform_instance()
    seed = np.zeros((9, 9), bool)
    seed[4, 4] = True
    edges[3:6, 3] = edges[3:6, 5] = True
    edges[3, 3:6] = edges[5, 3:6] = True
    cfg = df.DiffusionConfig(channel_weights=(1.0,), s_min=0.0)
    for stage in (1, 2):
        assert np.array_equal(
            df.diffuse_stage(seed, tern, class_maps(labels), edges, cfg, stage), seed)
    assert np.array_equal(df.diffuse(seed, tern, class_maps(labels), edges, cfg), seed)


def test_single_seed_no_barrier_matches_oracle():
    tern, labels, edges = uniform_instance(8, 8)
    seed = np.zeros((8, 8), bool)
    seed[3, 3] = True
    cfg = df.DiffusionConfig(channel_weights=(1.0,), w_gray=2.0, s_min=1.0)
    got = df.diffuse_stage(seed, tern, class_maps(labels), edges, cfg, 1)
    want = simulate_diffusion_stage(seed, tern, labels, 3, edges, (1.0,), 2.0, 0.0, 1.0, 1)
    assert np.array_equal(got, want)
    assert got.sum() > seed.sum()


def test_random_instances_match_oracle_both_stages():
    rng = np.random.RandomState(0)
    for trial in range(10):
        seed, tern, labels, edges = random_diffusion_instance(rng, n_channels=3)
        cm = class_maps(labels)
        s_min = (4.0, 5.0, 6.5)[trial % 3]
        cfg = df.DiffusionConfig(channel_weights=(2.0, 2.0, 1.0), s_min=s_min)
        for stage in (1, 2):
            got = df.diffuse_stage(seed, tern, cm, edges, cfg, stage)
            want = simulate_diffusion_stage(seed, tern, labels, 3, edges,
                                            (2.0, 2.0, 1.0), 2.0, 0.0, s_min, stage)
            assert np.array_equal(got, want)


def test_binary_label_maps_match_oracle():
    rng = np.random.RandomState(8)
    for _ in range(5):
        seed, tern, _, edges = random_diffusion_instance(rng, 24, 24)
        labels = rng.randint(0, 2, size=(4, 24, 24)).astype(np.uint8)
        cm = ChannelClassMaps(channels=(Channel.CB,) * 4, k=2,
                              maps=labels, thresholds=((0,),) * 4)
        cfg = df.DiffusionConfig(channel_weights=(2.0, 1.0, 1.0, 0.5), s_min=3.0)
        for stage in (1, 2):
            got = df.diffuse_stage(seed, tern, cm, edges, cfg, stage)
            want = simulate_diffusion_stage(seed, tern, labels, 2, edges,
                                            cfg.channel_weights, 2.0, 0.0, 3.0, stage)
            assert np.array_equal(got, want)


def test_max_ray_len_matches_oracle():
    rng = np.random.RandomState(1)
    seed, tern, labels, edges = random_diffusion_instance(rng, n_channels=2)
    cm = ChannelClassMaps(channels=(Channel.CB, Channel.CR), k=3,
                          maps=labels, thresholds=((0, 1),) * 2)
    cfg = df.DiffusionConfig(channel_weights=(2.0, 1.0), s_min=2.5, max_ray_len=4)
    for stage in (1, 2):
        got = df.diffuse_stage(seed, tern, cm, edges, cfg, stage)
        want = simulate_diffusion_stage(seed, tern, labels, 3, edges, (2.0, 1.0),
                                        2.0, 0.0, 2.5, stage, max_ray_len=4)
        assert np.array_equal(got, want)


def test_monotonicity_and_barrier():
    rng = np.random.RandomState(2)
    for _ in range(10):
        seed, tern, labels, edges = random_diffusion_instance(rng, n_channels=3)
        cm = class_maps(labels)
        cfg = df.DiffusionConfig(channel_weights=(2.0, 2.0, 1.0), s_min=4.5)
        out = df.diffuse(seed, tern, cm, edges, cfg)
        assert (out | seed == out).all()
        assert not (out & ~seed & edges).any()


def test_stage2_idempotence():
    rng = np.random.RandomState(3)
    for _ in range(10):
        seed, tern, labels, edges = random_diffusion_instance(rng, n_channels=3)
        cm = class_maps(labels)
        cfg = df.DiffusionConfig(channel_weights=(2.0, 2.0, 1.0), s_min=4.0)
        once = df.diffuse_stage(seed, tern, cm, edges, cfg, 2)
        twice = df.diffuse_stage(once, tern, cm, edges, cfg, 2, origins=seed)
        assert np.array_equal(once, twice)


def test_s_min_monotonicity():
    rng = np.random.RandomState(4)
    for _ in range(6):
        seed, tern, labels, edges = random_diffusion_instance(rng, n_channels=3)
        cm = class_maps(labels)
        prev = None
        for s_min in (3.0, 4.5, 6.0):
            out = df.diffuse(seed, tern, cm, edges,
                             df.DiffusionConfig(channel_weights=(2.0, 2.0, 1.0), s_min=s_min))
            if prev is not None:
                assert (out <= prev).all()
            prev = out


def test_gray_scores_at_least_black():
    rng = np.random.RandomState(5)
    cfg = df.DiffusionConfig(channel_weights=(2.0, 1.0, 0.5), w_gray=2.0, w_black=0.5)
    for _ in range(100):
        m = rng.randint(0, 3, size=3)
        u = rng.randint(0, 3, size=3)
        assert (df.diffusion_score(128, m, u, 3, cfg)
                >= df.diffusion_score(0, m, u, 3, cfg))


def test_determinism():
    rng = np.random.RandomState(6)
    seed, tern, labels, edges = random_diffusion_instance(rng, n_channels=3)
    cm = class_maps(labels)
    cfg = df.DiffusionConfig(channel_weights=(2.0, 2.0, 1.0), s_min=4.0)
    a = df.diffuse(seed, tern, cm, edges, cfg)
    b = df.diffuse(seed.copy(), tern.copy(), cm, edges.copy(), cfg)
    assert np.array_equal(a, b)


def test_seed_on_edge_still_emits_rays():
    tern, labels, edges = uniform_instance(7, 7)
    seed = np.zeros((7, 7), bool)
    seed[3, 3] = True
    edges[3, 3] = True  # the seed pixel itself is an edge
    cfg = df.DiffusionConfig(channel_weights=(1.0,), w_gray=2.0, s_min=1.0)
    out = df.diffuse_stage(seed, tern, class_maps(labels), edges, cfg, 1)
    assert out[3, 3]
    assert out.sum() > 1


def test_dimension_mismatch_rejected():
    tern, labels, edges = uniform_instance(5, 5)
    seed = np.zeros((6, 5), bool)
    cfg = df.DiffusionConfig(channel_weights=(1.0,))
    with pytest.raises(ValueError):
        df.diffuse_stage(seed, tern, class_maps(labels), edges, cfg, 1)


def test_channel_weight_alignment_rejected():
    tern, labels, edges = uniform_instance(5, 5, n_channels=2)
    seed = np.zeros((5, 5), bool)
    cfg = df.DiffusionConfig(channel_weights=(1.0,))
    with pytest.raises(ValueError):
        df.diffuse_stage(seed, tern, class_maps(labels), edges, cfg, 1)


def test_default_config_weights():
    cfg = df.default_config((Channel.CB, Channel.CR, Channel.I, Channel.H))
    assert cfg.channel_weights == (2.0, 2.0, 1.0, 1.0)
