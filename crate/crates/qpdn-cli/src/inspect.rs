//! Nearest vocabulary words for each trained measurement state.
//!
//! The default distance d(v, w) = sqrt(2 - 2|⟨v|w⟩|) depends on the inner
//! product modulus only, so it ignores a global phase on either state, which
//! matches how the model itself reads states (through Born probabilities).
//! The euclidean alternative compares the raw 2n real rectangular
//! coordinates instead and is phase-sensitive.

use qpdn::quantum::PolarState;
use qpdn::{Error, ParamSet64, Result};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceMetric {
    Overlap,
    Euclidean,
}

impl DistanceMetric {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "overlap" => Ok(DistanceMetric::Overlap),
            "euclidean" => Ok(DistanceMetric::Euclidean),
            other => Err(Error::Config(format!(
                "unknown metric {other:?}; expected overlap or euclidean"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DistanceMetric::Overlap => "overlap",
            DistanceMetric::Euclidean => "euclidean",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Neighbor {
    pub id: usize,
    pub word: String,
    pub distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasurementNeighbors {
    pub measurement: usize,
    pub neighbors: Vec<Neighbor>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NeighborReport {
    pub metric: &'static str,
    pub top: usize,
    pub measurements: Vec<MeasurementNeighbors>,
}

fn word_state(params: &ParamSet64, id: usize) -> PolarState<f64> {
    PolarState::from_raw(
        params.amplitude.row(id).to_vec(),
        params.phase.row(id).to_vec(),
    )
}

fn measurement_state(params: &ParamSet64, j: usize) -> PolarState<f64> {
    PolarState::from_raw(
        params.meas_amplitude.row(j).to_vec(),
        params.meas_phase.row(j).to_vec(),
    )
}

fn distance(metric: DistanceMetric, v: &PolarState<f64>, w: &PolarState<f64>) -> f64 {
    match metric {
        DistanceMetric::Overlap => {
            let (re, im) = v
                .inner_product(w)
                .expect("states share the model dimension");
            let modulus = (re * re + im * im).sqrt();
            (2.0 - 2.0 * modulus).max(0.0).sqrt()
        }
        DistanceMetric::Euclidean => {
            let (vc, vd) = v.to_rect();
            let (wc, wd) = w.to_rect();
            let mut sum = 0.0;
            for a in 0..vc.len() {
                sum += (vc[a] - wc[a]) * (vc[a] - wc[a]) + (vd[a] - wd[a]) * (vd[a] - wd[a]);
            }
            sum.sqrt()
        }
    }
}

/// Brute-force scan over the whole vocabulary for every measurement state.
/// `top` must already be clamped to the vocabulary size. Ties break toward
/// the lower vocabulary id, so the ranking is total and reproducible.
pub fn nearest_words(
    params: &ParamSet64,
    vocab: &[String],
    top: usize,
    metric: DistanceMetric,
) -> NeighborReport {
    let words: Vec<PolarState<f64>> = (0..vocab.len()).map(|id| word_state(params, id)).collect();
    let mut measurements = Vec::with_capacity(params.measurement_count);
    for j in 0..params.measurement_count {
        let v = measurement_state(params, j);
        let mut ranked: Vec<(f64, usize)> = words
            .iter()
            .enumerate()
            .map(|(id, w)| (distance(metric, &v, w), id))
            .collect();
        ranked.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .expect("finite distances")
                .then(a.1.cmp(&b.1))
        });
        ranked.truncate(top);
        measurements.push(MeasurementNeighbors {
            measurement: j,
            neighbors: ranked
                .into_iter()
                .map(|(distance, id)| Neighbor {
                    id,
                    word: vocab[id].clone(),
                    distance,
                })
                .collect(),
        });
    }
    NeighborReport {
        metric: metric.as_str(),
        top,
        measurements,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qpdn::model::{ParamSet, VariantTag};
    use qpdn::quantum::random_state;
    use rand::SeedableRng;

    fn toy_params() -> ParamSet64 {
        let mut params = ParamSet::<f64>::zeros(3, 4, 2, 2, VariantTag::Full);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for id in 0..4 {
            let s = random_state::<f64, _>(3, &mut rng);
            params.amplitude.row_mut(id).copy_from_slice(s.amplitudes());
            params.phase.row_mut(id).copy_from_slice(s.phases());
        }
        for j in 0..2 {
            let s = random_state::<f64, _>(3, &mut rng);
            params
                .meas_amplitude
                .row_mut(j)
                .copy_from_slice(s.amplitudes());
            params.meas_phase.row_mut(j).copy_from_slice(s.phases());
        }
        params
    }

    fn toy_vocab() -> Vec<String> {
        ["<oov>", "alpha", "beta", "gamma"]
            .iter()
            .map(|s| s.to_string())
            .collect()
    }

    #[test]
    fn identical_state_ranks_first_at_zero_distance() {
        let mut params = toy_params();
        let amps = params.amplitude.row(2).to_vec();
        let phases = params.phase.row(2).to_vec();
        params.meas_amplitude.row_mut(0).copy_from_slice(&amps);
        params.meas_phase.row_mut(0).copy_from_slice(&phases);
        let report = nearest_words(&params, &toy_vocab(), 4, DistanceMetric::Overlap);
        let first = &report.measurements[0].neighbors[0];
        assert_eq!(first.id, 2);
        assert!(first.distance < 1e-7);
    }

    #[test]
    fn overlap_distance_ignores_global_phase() {
        let mut params = toy_params();
        let amps = params.amplitude.row(1).to_vec();
        let mut phases = params.phase.row(1).to_vec();
        for p in &mut phases {
            *p += 1.3;
        }
        params.meas_amplitude.row_mut(0).copy_from_slice(&amps);
        params.meas_phase.row_mut(0).copy_from_slice(&phases);
        let report = nearest_words(&params, &toy_vocab(), 1, DistanceMetric::Overlap);
        assert_eq!(report.measurements[0].neighbors[0].id, 1);
        assert!(report.measurements[0].neighbors[0].distance < 1e-7);
        // The euclidean reading sees the shifted coordinates.
        let euclid = nearest_words(&params, &toy_vocab(), 4, DistanceMetric::Euclidean);
        assert!(
            euclid.measurements[0].neighbors[0].distance > 1e-3
                || euclid.measurements[0].neighbors[0].id != 1
        );
    }

    #[test]
    fn distances_are_non_decreasing_and_ties_prefer_lower_ids() {
        let mut params = toy_params();
        // Make two identical words so a tie actually occurs.
        let amps = params.amplitude.row(1).to_vec();
        let phases = params.phase.row(1).to_vec();
        params.amplitude.row_mut(3).copy_from_slice(&amps);
        params.phase.row_mut(3).copy_from_slice(&phases);
        let report = nearest_words(&params, &toy_vocab(), 4, DistanceMetric::Overlap);
        for m in &report.measurements {
            for pair in m.neighbors.windows(2) {
                assert!(pair[0].distance <= pair[1].distance + 1e-15);
                if (pair[0].distance - pair[1].distance).abs() < 1e-15 {
                    assert!(pair[0].id < pair[1].id);
                }
            }
        }
    }
}
