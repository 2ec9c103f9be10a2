//! Time-to-phase warping of single beats.
//!
//! A beat of `n_time` samples is stretched onto `n_phase` samples by placing
//! `n_phase` equidistant knots on the time axis and assigning each knot to
//! the time sample at or before it (the last knot lands on the last sample).
//! The implied matrix has exactly one 1 per phase row, so its Gramian is the
//! diagonal `counts`, and the exact left inverse averages each group of phase
//! samples that share a time sample.
//!
//! Indices are 0-based throughout.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhaseTransform {
    n_time: usize,
    /// Time index receiving each phase sample; non-decreasing.
    index_map: Vec<usize>,
    /// Number of phase samples per time index (Gramian diagonal).
    counts: Vec<usize>,
}

impl PhaseTransform {
    pub fn new(n_time: usize, n_phase: usize) -> Result<Self> {
        if n_time < 2 {
            return Err(Error::InvalidArgument(format!("beat length {n_time} must be >= 2")));
        }
        if n_phase < n_time {
            return Err(Error::PhaseTooShort { n_phase, n_time });
        }
        // floor(k (n_time - 1) / (n_phase - 1)) in exact integer arithmetic
        let (num, den) = ((n_time - 1) as u64, (n_phase - 1) as u64);
        let index_map = (0..n_phase as u64).map(|k| (k * num / den) as usize).collect();
        Ok(Self::from_index_map(n_time, index_map).expect("knot assignment is well formed"))
    }

    /// Builds a transform from an explicit assignment. The map must be
    /// non-decreasing and in range; time samples may be left without phase
    /// samples, in which case [`to_time`](Self::to_time) fails.
    pub fn from_index_map(n_time: usize, index_map: Vec<usize>) -> Result<Self> {
        if index_map.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument("index map must be non-decreasing".into()));
        }
        let mut counts = vec![0; n_time];
        for &j in &index_map {
            *counts.get_mut(j).ok_or_else(|| {
                Error::InvalidArgument(format!("index {j} outside beat of {n_time} samples"))
            })? += 1;
        }
        Ok(Self {
            n_time,
            index_map,
            counts,
        })
    }

    pub fn n_time(&self) -> usize {
        self.n_time
    }

    pub fn n_phase(&self) -> usize {
        self.index_map.len()
    }

    pub fn index_map(&self) -> &[usize] {
        &self.index_map
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Contiguous phase range mapped to each time sample.
    pub fn groups(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        self.counts.iter().scan(0, |start, &c| {
            let range = *start..*start + c;
            *start += c;
            Some(range)
        })
    }

    fn check_invertible(&self) -> Result<()> {
        match self.counts.iter().position(|&c| c == 0) {
            Some(j) => Err(Error::SingularGramian(j)),
            None => Ok(()),
        }
    }

    /// Gathers a time-domain beat onto the phase grid.
    pub fn to_phase(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_time {
            return Err(Error::LengthMismatch {
                expected: self.n_time,
                got: x.len(),
            });
        }
        Ok(self.index_map.iter().map(|&j| x[j]).collect())
    }

    /// Transposed map: sums the phase samples of each time sample.
    pub fn scatter_sum(&self, phase: &[f64]) -> Result<Vec<f64>> {
        if phase.len() != self.n_phase() {
            return Err(Error::LengthMismatch {
                expected: self.n_phase(),
                got: phase.len(),
            });
        }
        Ok(self.groups().map(|g| phase[g].iter().sum()).collect())
    }

    /// Exact back-transform: the mean of each group of phase samples.
    pub fn to_time(&self, phase: &[f64]) -> Result<Vec<f64>> {
        if phase.len() != self.n_phase() {
            return Err(Error::LengthMismatch {
                expected: self.n_phase(),
                got: phase.len(),
            });
        }
        self.check_invertible()?;
        Ok(self.groups().map(|g| group_mean(&phase[g])).collect())
    }
}

/// Mean computed about the first element so that a group of identical values
/// returns that value bit for bit.
pub(crate) fn group_mean(values: &[f64]) -> f64 {
    let first = values[0];
    first + values.iter().map(|v| v - first).sum::<f64>() / values.len() as f64
}

/// Default phase length: 20% headroom over the longest beat, and at least
/// one sample more than it.
pub fn default_phase_len(max_beat_len: usize) -> usize {
    let headroom = (1.2 * max_beat_len as f64).ceil() as usize;
    headroom.max(max_beat_len + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct evaluation of the knot rule `j <= k (N-1)/(T-1) < j + 1`
    /// (0-based) in floating point, with the final knot moved onto the last
    /// sample.
    fn knot_rule(n_time: usize, n_phase: usize) -> Vec<usize> {
        (0..n_phase)
            .map(|k| {
                let pos = k as f64 * (n_time - 1) as f64 / (n_phase - 1) as f64;
                (0..n_time - 1)
                    .find(|&j| j as f64 <= pos && pos < (j + 1) as f64)
                    .unwrap_or(n_time - 1)
            })
            .collect()
    }

    #[test]
    fn three_onto_five() {
        let tf = PhaseTransform::new(3, 5).unwrap();
        assert_eq!(tf.index_map(), &[0, 0, 1, 1, 2]);
        assert_eq!(tf.counts(), &[2, 2, 1]);
        assert_eq!(knot_rule(3, 5), tf.index_map());
    }

    #[test]
    fn two_onto_four() {
        // knots at 0, 1/3, 2/3, 1: three fall in [0, 1), the last is the endpoint
        let tf = PhaseTransform::new(2, 4).unwrap();
        assert_eq!(tf.index_map(), &[0, 0, 0, 1]);
        assert_eq!(tf.counts(), &[3, 1]);
        assert_eq!(knot_rule(2, 4), tf.index_map());
    }

    #[test]
    fn equal_lengths_give_identity() {
        let tf = PhaseTransform::new(7, 7).unwrap();
        assert_eq!(tf.index_map(), &[0, 1, 2, 3, 4, 5, 6]);
        assert!(tf.counts().iter().all(|&c| c == 1));
        let x = [1.0, -2.0, 3.5, 0.0, 9.0, 1e-3, 4.0];
        assert_eq!(tf.to_phase(&x).unwrap(), x);
    }

    #[test]
    fn matches_knot_rule_on_many_sizes() {
        for n_time in 2..40 {
            for n_phase in n_time..n_time * 3 {
                let tf = PhaseTransform::new(n_time, n_phase).unwrap();
                assert_eq!(tf.index_map(), knot_rule(n_time, n_phase), "{n_time} {n_phase}");
            }
        }
    }

    #[test]
    fn gather_and_average() {
        let tf = PhaseTransform::new(3, 5).unwrap();
        assert_eq!(tf.to_phase(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 1.0, 2.0, 2.0, 3.0]);
        assert_eq!(tf.to_phase(&[0.0; 3]).unwrap(), vec![0.0; 5]);
        assert_eq!(tf.to_time(&[1.0, 3.0, 5.0, 7.0, 9.0]).unwrap(), vec![2.0, 6.0, 9.0]);
        assert_eq!(tf.to_time(&[4.25; 5]).unwrap(), vec![4.25; 3]);
        assert_eq!(tf.scatter_sum(&[1.0, 3.0, 5.0, 7.0, 9.0]).unwrap(), vec![4.0, 12.0, 9.0]);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            PhaseTransform::new(5, 4),
            Err(Error::PhaseTooShort { n_phase: 4, n_time: 5 })
        ));
        assert!(PhaseTransform::new(1, 4).is_err());
        let tf = PhaseTransform::new(3, 5).unwrap();
        assert!(matches!(tf.to_phase(&[1.0]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(tf.to_time(&[1.0]), Err(Error::LengthMismatch { .. })));

        let gappy = PhaseTransform::from_index_map(3, vec![0, 0, 2, 2]).unwrap();
        assert!(matches!(gappy.to_time(&[1.0; 4]), Err(Error::SingularGramian(1))));
        assert!(PhaseTransform::from_index_map(3, vec![0, 2, 1]).is_err());
        assert!(PhaseTransform::from_index_map(3, vec![0, 3]).is_err());
    }

    #[test]
    fn gramian_by_explicit_products() {
        for (n_time, n_phase) in [(2, 2), (3, 5), (4, 9), (5, 6), (6, 17)] {
            let tf = PhaseTransform::new(n_time, n_phase).unwrap();
            let theta: Vec<Vec<f64>> = (0..n_phase)
                .map(|k| (0..n_time).map(|j| (tf.index_map()[k] == j) as u8 as f64).collect())
                .collect();
            for a in 0..n_time {
                for b in 0..n_time {
                    let g: f64 = (0..n_phase).map(|k| theta[k][a] * theta[k][b]).sum();
                    let expected = if a == b { tf.counts()[a] as f64 } else { 0.0 };
                    assert_eq!(g, expected);
                }
            }
            for k in 0..n_phase {
                let d: f64 = (0..n_time).map(|j| theta[k][j] * theta[k][j]).sum();
                assert_eq!(d, 1.0);
            }
        }
    }

    #[test]
    fn default_length_has_headroom() {
        assert_eq!(default_phase_len(250), 300);
        assert_eq!(default_phase_len(2), 3);
        assert_eq!(default_phase_len(1), 2);
        assert_eq!(default_phase_len(11), 14);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn round_trip_is_exact(
                n_time in 2usize..400,
                extra in 0usize..400,
                seed in any::<u64>(),
            ) {
                let tf = PhaseTransform::new(n_time, n_time + extra).unwrap();
                let x: Vec<f64> = (0..n_time)
                    .map(|i| ((seed.wrapping_mul(6364136223846793005).wrapping_add((i as u64).wrapping_mul(1442695040888963407))) >> 11) as f64 / (1u64 << 53) as f64 * 10.0 - 5.0)
                    .collect();
                prop_assert_eq!(tf.to_time(&tf.to_phase(&x).unwrap()).unwrap(), x);
            }

            #[test]
            fn map_is_monotone_without_gaps(n_time in 2usize..500, extra in 0usize..500) {
                let tf = PhaseTransform::new(n_time, n_time + extra).unwrap();
                let map = tf.index_map();
                prop_assert_eq!(map[0], 0);
                prop_assert_eq!(*map.last().unwrap(), n_time - 1);
                prop_assert!(map.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1));
                prop_assert!(tf.counts().iter().all(|&c| c >= 1));
                prop_assert_eq!(tf.counts().iter().sum::<usize>(), n_time + extra);
            }
        }
    }
}
