"""Diversity-weighted corpus sampling: cluster synthetic document embeddings,
weight clusters by entropy x variance x size, and draw a stratified sample."""

import numpy as np

from policyann.sampler import SamplerConfig, build_cluster_report


def main():
    rng = np.random.default_rng(0)
    # three synthetic "topic" blobs of different tightness and size
    vectors = np.vstack(
        [
            rng.normal((0, 0), 0.3, size=(120, 2)),
            rng.normal((8, 0), 1.5, size=(60, 2)),
            rng.normal((0, 8), 0.8, size=(20, 2)),
        ]
    )
    ids = [f"doc{i:03d}" for i in range(len(vectors))]
    word_counts = list(rng.integers(200, 5000, size=len(vectors)))

    config = SamplerConfig(sample_size=24, k="auto", seed=0)
    stats, sample, elbow = build_cluster_report(vectors, ids, word_counts, config)

    if elbow:
        print(f"elbow selected k={elbow.k} (found={elbow.elbow_found})")
        print("inertia curve:", {k: round(v, 1) for k, v in elbow.curve.items()})
    print(f"\n{'c':>2} {'n':>5} {'H':>7} {'S2':>7} {'w':>7} {'s_c':>4}")
    for s in stats:
        print(f"{s.cluster_id:>2} {s.n:>5} {s.entropy:>7.4f} {s.variance:>7.4f} "
              f"{s.weight:>7.4f} {s.allocation:>4}")
    print(f"\nsampled {len(sample)} ids, e.g. {sample[:6]}")


if __name__ == "__main__":
    main()
