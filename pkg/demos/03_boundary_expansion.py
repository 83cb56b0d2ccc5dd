"""
Generating outside the training data
====================================

In Example III the training data is a thin ring of radius 0.325 to 0.375
while the quality modes sit at radius 0.4. A quality-aware generator should
leak samples out of the ring toward the modes.
"""

from padgan import TrainingConfig, preset, train
from padgan.evaluation import novelty_split

ex3 = preset("example3")
data = ex3.sample(10_000, seed=0)

for variant in ("gan", "padgan"):
    model = train(TrainingConfig(variant=variant, seed=0), data, ex3.quality)
    samples = model.sample(1000, rng=1)
    high, low = novelty_split(samples, ex3.descriptor, ex3.quality)
    print(f"{variant:7s} outside the ring: {high:.1%} high quality, {low:.1%} low quality")
