//! Amplitude-swap data augmentation: each cloud keeps its own phase
//! (geometry) and takes the amplitude of a seed-chosen donor cloud before
//! reconstruction.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::spectral::{
    amplitude_swap, decompose_with_geometry, reconstruct, ChannelMode, ReconstructionParams,
};
use crate::voxel::{compute_shared_geometry, VoxelSizePolicy};

/// Configuration of the augmentation pass. The seed fully determines the
/// donor assignment, so a fixed configuration reproduces a dataset
/// bit-identically.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentConfig {
    pub seed: u64,
    pub mode: ChannelMode,
    pub pi_threshold: f64,
    pub voxel_policy: VoxelSizePolicy,
    /// Restrict donors to clouds with the same label. A cloud that is the
    /// sole member of its label becomes its own donor (a round trip).
    pub same_class_only: bool,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            seed: 0,
            mode: ChannelMode::All,
            pi_threshold: 0.5,
            voxel_policy: VoxelSizePolicy::default(),
            same_class_only: false,
        }
    }
}

/// Replaces `target`'s amplitude with `donor`'s (per channel mode) over a
/// geometry shared by both clouds, then reconstructs.
///
/// An [`Error::EmptyReconstruction`] is the skip signal: the caller
/// decides whether to fall back to the unaugmented cloud.
pub fn augment_pair(target: &PointCloud, donor: &PointCloud, cfg: &AugmentConfig) -> Result<PointCloud> {
    let (t_min, t_max) = target.bounds();
    let (d_min, d_max) = donor.bounds();
    let mins = [t_min[0].min(d_min[0]), t_min[1].min(d_min[1]), t_min[2].min(d_min[2])];
    let maxs = [t_max[0].max(d_max[0]), t_max[1].max(d_max[1]), t_max[2].max(d_max[2])];
    let voxel_size = cfg.voxel_policy.resolve(mins, maxs)?;

    let geometry = compute_shared_geometry(target, donor, voxel_size)?;
    let target_ap = decompose_with_geometry(target, &geometry)?;
    let donor_ap = decompose_with_geometry(donor, &geometry)?;
    let (augmented, _) = amplitude_swap(&target_ap, &donor_ap, cfg.mode)?;
    reconstruct(
        &augmented,
        &ReconstructionParams { pi_threshold: cfg.pi_threshold, channel_mode: cfg.mode },
    )
}

/// Samples a permutation without fixed points, uniformly over all
/// derangements, by seeded rejection.
fn derangement(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    debug_assert!(n >= 2);
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        perm.shuffle(rng);
        if perm.iter().enumerate().all(|(i, &p)| i != p) {
            return perm;
        }
    }
}

/// Donor index for each cloud, derived from the seed. Without a class
/// restriction this is one derangement of the whole dataset; with it,
/// each label group gets its own derangement and singleton groups map to
/// themselves.
pub fn donor_assignment(labels: &[&str], cfg: &AugmentConfig) -> Result<Vec<usize>> {
    let n = labels.len();
    if n < 2 {
        return Err(Error::DatasetTooSmall(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    if !cfg.same_class_only {
        return Ok(derangement(n, &mut rng));
    }

    let mut groups: Vec<(&str, Vec<usize>)> = Vec::new();
    for (i, &label) in labels.iter().enumerate() {
        match groups.iter_mut().find(|(l, _)| *l == label) {
            Some((_, members)) => members.push(i),
            None => groups.push((label, vec![i])),
        }
    }
    let mut donors = vec![0usize; n];
    for (_, members) in &groups {
        if members.len() == 1 {
            donors[members[0]] = members[0];
        } else {
            let local = derangement(members.len(), &mut rng);
            for (slot, donor) in members.iter().zip(local.iter().map(|&j| members[j])) {
                donors[*slot] = donor;
            }
        }
    }
    Ok(donors)
}

/// Per-cloud outcome of a dataset pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AugmentOutcome {
    /// The amplitude swap reconstructed normally.
    Swapped { donor: usize },
    /// Reconstruction came back empty; the original cloud was kept.
    SkippedEmpty { donor: usize },
}

/// Augments every cloud against a seed-derived donor. The output has the
/// same length and order as the input; pairs whose reconstruction comes
/// back empty fall back to the unaugmented cloud and are flagged in the
/// outcomes.
pub fn augment_dataset(
    clouds: &[PointCloud],
    cfg: &AugmentConfig,
) -> Result<(Vec<PointCloud>, Vec<AugmentOutcome>)> {
    let labels = vec![""; clouds.len()];
    augment_dataset_labeled(clouds, &labels, cfg)
}

/// As [`augment_dataset`] with per-cloud labels, honoring
/// `same_class_only`.
pub fn augment_dataset_labeled(
    clouds: &[PointCloud],
    labels: &[&str],
    cfg: &AugmentConfig,
) -> Result<(Vec<PointCloud>, Vec<AugmentOutcome>)> {
    if clouds.len() != labels.len() {
        return Err(Error::ShapeMismatch { expected: clouds.len(), actual: labels.len() });
    }
    let donors = donor_assignment(labels, cfg)?;
    let mut output = Vec::with_capacity(clouds.len());
    let mut outcomes = Vec::with_capacity(clouds.len());
    for (i, cloud) in clouds.iter().enumerate() {
        let donor = donors[i];
        match augment_pair(cloud, &clouds[donor], cfg) {
            Ok(augmented) => {
                output.push(augmented);
                outcomes.push(AugmentOutcome::Swapped { donor });
            }
            Err(Error::EmptyReconstruction { .. }) => {
                output.push(cloud.clone());
                outcomes.push(AugmentOutcome::SkippedEmpty { donor });
            }
            Err(other) => return Err(other),
        }
    }
    Ok((output, outcomes))
}
