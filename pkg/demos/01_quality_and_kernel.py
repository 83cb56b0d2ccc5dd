"""
Quality landscapes and the batch kernel
=======================================

Build the Example I quality landscape, form a batch kernel from a handful of
points and see how the loss reacts to duplicates and to quality.
"""

import numpy as np

from padgan import build_kernel, pad_loss, pad_loss_gradients, preset

ex1 = preset("example1")
q = ex1.quality
print("mixture centers:\n", q.centers.round(3))
print("normalizer:", q.normalizer)

# quality is ~1 on a mode and ~0 far away
print("q at a mode:", q.evaluate(q.centers[0]), " q at origin:", q.evaluate(np.zeros(2)))

# %%
# A batch of five points. Entry (i, j) of the kernel is the RBF similarity
# scaled by (q_i q_j)^gamma0.
rng = np.random.default_rng(0)
batch = rng.uniform(-0.5, 0.5, (5, 2))
kernel = build_kernel(batch, q.evaluate(batch), gamma0=2.0)
print("kernel:\n", kernel.matrix.round(4))
print("loss:", pad_loss(kernel))

# %%
# Duplicating a point makes the kernel nearly singular, so the loss jumps.
dup = np.vstack([batch[:4], batch[:1]])
print("loss with a duplicate:", pad_loss(build_kernel(dup, q.evaluate(dup), 2.0)))

# %%
# Moving every point onto a mode lowers the loss: higher quality, same spread.
on_modes = q.centers[:5]
print("loss on five modes:", pad_loss(build_kernel(on_modes, q.evaluate(on_modes), 2.0)))

# %%
# The gradient with respect to the points. Descending it spreads the batch
# out and pulls points uphill in quality.
g = pad_loss_gradients(kernel, batch, q.gradient(batch))
moved = batch - 0.01 * g
print("loss after one small step:", pad_loss(build_kernel(moved, q.evaluate(moved), 2.0)))
