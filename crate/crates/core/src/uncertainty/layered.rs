use num_traits::Signed;
use serde::{Deserialize, Serialize};

use super::DEFAULT_EXPANSION_CAP;
use super::{neighborhood_with_cap, FocalElement, MassFunction, Metric, NeighborhoodSpec};
use crate::election::ScoreVector;
use crate::error::{Error, Result};
use crate::rational::{one, zero, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerKind {
    /// Weight `β_k` on the whole ball `S_{r_k}`.
    Nested,
    /// Weight `β_k` on the ring `S_{r_k} \ S_{r_{k-1}}`.
    Partitioned,
}

/// Neighbourhood layers and their weights, independent of where they are centred.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredSpec {
    pub kind: LayerKind,
    pub metric: Metric,
    pub radii: Vec<u32>,
    pub weights: Vec<Rational>,
}

impl LayeredSpec {
    pub fn new(kind: LayerKind, metric: Metric, radii: Vec<u32>, weights: Vec<Rational>) -> Result<Self> {
        let spec = Self {
            kind,
            metric,
            radii,
            weights,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// One ball with weight one.
    pub fn single(metric: Metric, radius: u32) -> Self {
        Self {
            kind: LayerKind::Nested,
            metric,
            radii: vec![radius],
            weights: vec![one()],
        }
    }

    fn validate(&self) -> Result<()> {
        if self.radii.is_empty() {
            return Err(Error::InvalidLayered("no layers".into()));
        }
        if self.radii.len() != self.weights.len() {
            return Err(Error::InvalidLayered(format!(
                "{} radii but {} weights",
                self.radii.len(),
                self.weights.len()
            )));
        }
        if self.radii.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidLayered("radii must be strictly increasing".into()));
        }
        if self.weights.iter().any(|w| !w.is_positive()) {
            return Err(Error::InvalidLayered("weights must be positive".into()));
        }
        let total = self.weights.iter().fold(zero(), |a, w| a + w);
        if total != one() {
            return Err(Error::InvalidLayered(format!("weights sum to {total}, not 1")));
        }
        Ok(())
    }

    /// `β_1 ≥ β_2 ≥ … ≥ β_K`, the hypothesis of both convergence theorems.
    pub fn is_decreasing(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn max_radius(&self) -> u32 {
        *self.radii.last().expect("validated nonempty")
    }

    pub fn centered(&self, center: ScoreVector) -> LayeredBelief {
        LayeredBelief {
            center,
            spec: self.clone(),
        }
    }

    /// Builds the mass around `center` from one expansion of the outermost ball.
    pub fn mass_around(&self, center: &ScoreVector, cap: usize) -> Result<MassFunction> {
        let outer = neighborhood_with_cap(center, NeighborhoodSpec::new(self.metric, self.max_radius()), cap)?;
        let k = self.radii.len();
        let mut layers: Vec<Vec<ScoreVector>> = vec![Vec::new(); k];
        for p in outer.points() {
            let d = self.metric.radius_of(center, p);
            // first layer whose radius covers the point
            let first = self.radii.partition_point(|&r| (r as u64) < d);
            match self.kind {
                LayerKind::Nested => {
                    for layer in &mut layers[first..] {
                        layer.push(p.clone());
                    }
                }
                LayerKind::Partitioned => layers[first].push(p.clone()),
            }
        }
        let mut assignments: Vec<(FocalElement, Rational)> = Vec::with_capacity(k);
        for (i, (points, w)) in layers.into_iter().zip(&self.weights).enumerate() {
            if points.is_empty() {
                return Err(Error::EmptyRing(i + 1));
            }
            let focal = FocalElement::from_sorted(points)?;
            // voter-swap balls stop growing once every vote is movable; equal balls merge
            match assignments.last_mut() {
                Some((prev, acc)) if *prev == focal => *acc += w,
                _ => assignments.push((focal, w.clone())),
            }
        }
        MassFunction::new(assignments)
    }
}

/// Layers centred on a broadcast score.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayeredBelief {
    pub center: ScoreVector,
    pub spec: LayeredSpec,
}

impl LayeredBelief {
    pub fn new(
        center: ScoreVector,
        kind: LayerKind,
        metric: Metric,
        radii: Vec<u32>,
        weights: Vec<Rational>,
    ) -> Result<Self> {
        Ok(LayeredSpec::new(kind, metric, radii, weights)?.centered(center))
    }
}

pub fn layered_to_mass(layered: &LayeredBelief) -> Result<MassFunction> {
    layered.spec.mass_around(&layered.center, DEFAULT_EXPANSION_CAP)
}
