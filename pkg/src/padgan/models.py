"""GAN, GAN_D, GAN_Q and PaDGAN: losses, schedule and the training loop."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field, replace

import numpy as np

from . import nn
from .dpp import KernelFactorizationError, SimilarityKernel, build_kernel, pad_loss, pad_loss_gradients
from .quality import realisticity_weighted_quality

log = logging.getLogger(__name__)

VARIANTS = ("gan", "gan_d", "gan_q", "padgan")


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainingConfig:
    variant: str = "padgan"
    gamma0: float = 2.0
    gamma1_final: float = 0.5
    schedule_exponent: float = 2.0
    gamma2: float = 10.0
    batch_size: int = 32
    total_steps: int = 10_000
    seed: int = 0
    lr_generator: float = 5e-4
    lr_discriminator: float = 5e-4
    beta1: float = 0.5
    beta2: float = 0.999
    realisticity_weighting: bool = False
    bandwidth: float = 1.0
    jitter: float = 1e-6
    noise_dim: int = 5
    hidden: tuple[int, ...] = (64, 64)
    leaky_slope: float = 0.2
    saturating: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.variant == "gan_d":
            object.__setattr__(self, "gamma0", 0.0)
        if self.variant == "gan":
            object.__setattr__(self, "gamma1_final", 0.0)
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))
        checks = [
            (self.gamma0 >= 0, "gamma0 >= 0"),
            (self.gamma1_final >= 0, "gamma1_final >= 0"),
            (self.gamma2 >= 0, "gamma2 >= 0"),
            (self.schedule_exponent > 0, "schedule_exponent > 0"),
            (self.batch_size >= 2, "batch_size >= 2"),
            (self.total_steps >= 0, "total_steps >= 0"),
            (self.lr_generator > 0 and self.lr_discriminator > 0, "learning rates > 0"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ValueError(f"invalid TrainingConfig: need {msg}")

    @property
    def similarity(self) -> SimilarityKernel:
        return SimilarityKernel("rbf", self.bandwidth)


# -- losses ----------------------------------------------------------------


def _softplus(a):
    return np.logaddexp(0.0, a)


def discriminator_loss(d_real, d_fake) -> float:
    """-(mean log D(x) + mean log(1 - D(G(z)))) on probabilities."""
    d_real = np.asarray(d_real, dtype=float)
    d_fake = np.asarray(d_fake, dtype=float)
    return float(-np.mean(np.log(d_real)) - np.mean(np.log1p(-d_fake)))


def discriminator_loss_from_logits(real_logits, fake_logits) -> float:
    # -log sigmoid(a) = softplus(-a);  -log(1 - sigmoid(a)) = softplus(a)
    return float(np.mean(_softplus(-real_logits)) + np.mean(_softplus(fake_logits)))


def generator_adversarial_loss(d_fake) -> float:
    """Non-saturating generator loss -mean log D(G(z))."""
    return float(-np.mean(np.log(np.asarray(d_fake, dtype=float))))


def generator_adversarial_loss_from_logits(fake_logits, saturating: bool = False) -> float:
    if saturating:
        # mean log(1 - D(G(z)))
        return float(-np.mean(_softplus(fake_logits)))
    return float(np.mean(_softplus(-fake_logits)))


def quality_only_loss(qualities) -> float:
    return float(-np.mean(qualities))


def gamma1_schedule(t, total_steps, gamma1_final, exponent=2.0) -> float:
    """Escalating weight gamma1' * (t / T)^p."""
    if not 0 <= t <= total_steps:
        raise ValueError(f"step {t} outside [0, {total_steps}]")
    if total_steps == 0:
        return float(gamma1_final)
    return float(gamma1_final * (t / total_steps) ** exponent)


# -- model state -----------------------------------------------------------


@dataclass(frozen=True)
class StepLosses:
    d_loss: float
    g_adv_loss: float
    aux_loss: float
    gamma1: float


@dataclass(eq=False)
class TrainedModel:
    generator: nn.DenseNetwork
    discriminator: nn.DenseNetwork
    gen_opt: nn.OptimizerState
    disc_opt: nn.OptimizerState
    config: TrainingConfig
    history: list[StepLosses] = field(default_factory=list)

    @property
    def step(self) -> int:
        return self.gen_opt.step

    def sample(self, n: int, rng=None) -> np.ndarray:
        rng = np.random.default_rng(rng)
        z = rng.standard_normal((n, self.config.noise_dim))
        return self.generator(z)

    def discriminate(self, x) -> np.ndarray:
        return self.discriminator(np.atleast_2d(x))[:, 0]

    def write_history(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["step", "d_loss", "g_adv_loss", "aux_loss", "gamma1"])
            for i, s in enumerate(self.history):
                w.writerow([i, repr(s.d_loss), repr(s.g_adv_loss), repr(s.aux_loss), repr(s.gamma1)])


def init_model(config: TrainingConfig, data_dim: int = 2) -> TrainedModel:
    seeds = np.random.SeedSequence(config.seed).spawn(2)
    gen = nn.init_network(
        (config.noise_dim, *config.hidden, data_dim), "leaky_relu", "identity",
        seed=seeds[0], leaky_slope=config.leaky_slope,
    )
    disc = nn.init_network(
        (data_dim, *config.hidden, 1), "leaky_relu", "sigmoid",
        seed=seeds[1], leaky_slope=config.leaky_slope,
    )
    hyper = dict(beta1=config.beta1, beta2=config.beta2)
    return TrainedModel(
        gen,
        disc,
        nn.OptimizerState.for_network(gen, learning_rate=config.lr_generator, **hyper),
        nn.OptimizerState.for_network(disc, learning_rate=config.lr_discriminator, **hyper),
        config,
    )


# -- gradients -------------------------------------------------------------


@dataclass
class GeneratorGradients:
    """Generator parameter gradients, with the adversarial and auxiliary parts kept apart.

    ``total`` is computed from the summed output gradient, so it equals
    ``adversarial + aux`` only up to round-off.
    """

    total: nn.ParamGrads
    adversarial: nn.ParamGrads
    aux: nn.ParamGrads | None
    g_adv_loss: float
    aux_loss: float


def discriminator_gradients(model: TrainedModel, real, fake):
    real_logits_tape = nn.forward(model.discriminator, real)[1]
    fake_logits_tape = nn.forward(model.discriminator, fake)[1]
    a_r, a_f = real_logits_tape.logits, fake_logits_tape.logits
    loss = discriminator_loss_from_logits(a_r, a_f)
    # d softplus(-a)/da = sigmoid(a) - 1 ; d softplus(a)/da = sigmoid(a)
    g_r = (nn.sigmoid(a_r) - 1.0) / len(a_r)
    g_f = nn.sigmoid(a_f) / len(a_f)
    grads_r, _ = nn.backward(model.discriminator, real_logits_tape, g_r, from_logits=True)
    grads_f, _ = nn.backward(model.discriminator, fake_logits_tape, g_f, from_logits=True)
    return grads_r + grads_f, loss


def _aux_output_gradient(model: TrainedModel, x, gamma1: float, quality):
    """Gradient of the weighted auxiliary loss with respect to generated points."""
    cfg = model.config
    if cfg.variant in ("padgan", "gan_d"):
        if cfg.realisticity_weighting:
            d_tape = nn.forward(model.discriminator, x)[1]
            d = d_tape.outputs[:, 0]
            q_raw = quality.evaluate(x)
            q = realisticity_weighted_quality(d, q_raw)
            # d(D q')/dx = q' dD/dx + D dq'/dx
            _, dd_dx = nn.backward(model.discriminator, d_tape, np.ones_like(d_tape.outputs))
            dq = q_raw[:, None] * dd_dx + d[:, None] * quality.gradient(x)
        else:
            q = quality.evaluate(x)
            dq = quality.gradient(x)
        kernel = build_kernel(x, q, cfg.gamma0, cfg.similarity, cfg.jitter)
        loss = pad_loss(kernel)
        if gamma1 == 0:
            return None, loss
        return gamma1 * pad_loss_gradients(kernel, x, dq), loss
    if cfg.variant == "gan_q":
        q = quality.evaluate(x)
        loss = quality_only_loss(q)
        if cfg.gamma2 == 0:
            return None, loss
        return -(cfg.gamma2 / len(x)) * quality.gradient(x), loss
    return None, 0.0


def generator_gradients(model: TrainedModel, z, quality, gamma1: float) -> GeneratorGradients:
    cfg = model.config
    x, g_tape = nn.forward(model.generator, z)
    d_tape = nn.forward(model.discriminator, x)[1]
    a = d_tape.logits
    g_adv = generator_adversarial_loss_from_logits(a, cfg.saturating)
    if cfg.saturating:
        out_grad = -nn.sigmoid(a) / len(a)
    else:
        out_grad = (nn.sigmoid(a) - 1.0) / len(a)
    _, dx_adv = nn.backward(model.discriminator, d_tape, out_grad, from_logits=True)
    adv_grads, _ = nn.backward(model.generator, g_tape, dx_adv)

    dx_aux, aux_loss = _aux_output_gradient(model, x, gamma1, quality)
    if dx_aux is None:
        return GeneratorGradients(adv_grads, adv_grads, None, g_adv, aux_loss)
    aux_grads, _ = nn.backward(model.generator, g_tape, dx_aux)
    total, _ = nn.backward(model.generator, g_tape, dx_adv + dx_aux)
    return GeneratorGradients(total, adv_grads, aux_grads, g_adv, aux_loss)


# -- training --------------------------------------------------------------


def train_step(
    model: TrainedModel, data_batch, quality, rng, step: int | None = None
) -> tuple[TrainedModel, StepLosses]:
    """One discriminator update followed by one generator update.

    ``step`` drives the gamma1 schedule and defaults to the number of updates
    already applied. The input model is not modified; its history is carried
    over unchanged.
    """
    cfg = model.config
    t = model.step if step is None else step
    real = np.asarray(data_batch, dtype=float)
    if len(real) != cfg.batch_size:
        raise ValueError(f"data batch has {len(real)} rows, batch_size is {cfg.batch_size}")
    gamma1 = (
        gamma1_schedule(min(t, cfg.total_steps), cfg.total_steps, cfg.gamma1_final, cfg.schedule_exponent)
        if cfg.variant in ("padgan", "gan_d")
        else 0.0
    )

    z_d = rng.standard_normal((cfg.batch_size, cfg.noise_dim))
    fake = model.generator(z_d)
    d_grads, d_loss = discriminator_gradients(model, real, fake)
    disc, disc_opt = nn.adam_step(model.discriminator, model.disc_opt, d_grads)
    updated = replace(model, discriminator=disc, disc_opt=disc_opt)

    grads = None
    for attempt in range(2):
        z_g = rng.standard_normal((cfg.batch_size, cfg.noise_dim))
        try:
            grads = generator_gradients(updated, z_g, quality, gamma1)
            break
        except KernelFactorizationError as exc:
            log.warning("step %d: batch kernel factorization failed (%s), attempt %d", t, exc, attempt + 1)
    if grads is None:
        raise TrainingError(f"step {t}: batch kernel not positive definite after retry")
    try:
        gen, gen_opt = nn.adam_step(updated.generator, updated.gen_opt, grads.total)
    except FloatingPointError as exc:
        raise TrainingError(f"step {t}: {exc}") from exc

    losses = StepLosses(d_loss, grads.g_adv_loss, grads.aux_loss, gamma1)
    return replace(updated, generator=gen, gen_opt=gen_opt), losses


def _batches(n: int, batch_size: int, rng):
    while True:
        perm = rng.permutation(n)
        for i in range(0, n - batch_size + 1, batch_size):
            yield perm[i : i + batch_size]


def train(config: TrainingConfig, dataset, quality, progress=None) -> TrainedModel:
    """Run ``config.total_steps`` alternating updates on shuffled minibatches."""
    points = np.asarray(getattr(dataset, "points", dataset), dtype=float)
    if len(points) == 0:
        raise ValueError("empty dataset")
    if len(points) < config.batch_size:
        raise ValueError("dataset smaller than one batch")
    model = init_model(config, points.shape[1])
    rng = np.random.default_rng(np.random.SeedSequence(config.seed).spawn(3)[2])
    batches = _batches(len(points), config.batch_size, rng)
    for t in range(config.total_steps):
        model, losses = train_step(model, points[next(batches)], quality, rng, step=t)
        model.history.append(losses)
        if progress is not None:
            progress(t, model)
    return model
