"""Quality- and diversity-seeking GAN training on synthetic 2-D design spaces."""

from .datasets import ExperimentPreset, SyntheticDataset, preset, sample_grid, sample_ring
from .dpp import BatchKernel, SimilarityKernel, build_kernel, pad_loss, pad_loss_gradients, rbf_similarity
from .evaluation import (
    ScoreReport,
    aggregate_runs,
    diversity_score,
    novelty_split,
    overall_score,
    quality_score,
    score_samples,
)
from .models import TrainedModel, TrainingConfig, gamma1_schedule, train, train_step
from .quality import GaussianMixtureQuality, realisticity_weighted_quality, ring_centers

__version__ = "0.1.0"
