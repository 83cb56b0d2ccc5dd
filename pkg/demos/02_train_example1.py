"""
Training GAN and PaDGAN on the ring of modes
============================================

Train a vanilla GAN and a PaDGAN on Example I with the same seed, score 1000
samples from each and write density plots next to this script.

The default 10k steps take a few seconds per thousand steps on one core.
Set STEPS lower for a quick look.
"""

from pathlib import Path

from padgan import TrainingConfig, preset, score_samples, train
from padgan.plotting import plot_density

STEPS = 10_000
HERE = Path(__file__).parent

ex1 = preset("example1")
data = ex1.sample(10_000, seed=0)

for variant in ("gan", "padgan"):
    cfg = TrainingConfig(variant=variant, total_steps=STEPS, seed=0)
    model = train(cfg, data, ex1.quality)
    samples = model.sample(1000, rng=1)
    report = score_samples(samples, ex1.quality, ex1.descriptor, seed=2)
    print(f"{variant:7s} diversity {report.diversity_score:7.2f}  quality {report.quality_score:.3f}  "
          f"overall {report.overall_score:.3f}  per-mode {report.mode_counts}")
    plot_density(samples, ex1, HERE / f"density_example1_{variant}.svg", title=f"Example I, {variant}")

# %%
# The last losses of the run: the generator's adversarial loss, the
# auxiliary (DPP) loss and the escalating weight gamma1.
last = model.history[-1]
print("final step:", last)
