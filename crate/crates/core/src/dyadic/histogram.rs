use crate::numeric::compensated_sum;

/// Distribution of a step function's values on one cube: `(value, measure)`
/// pairs sorted by value, with equal values merged and empty pieces dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueHistogram {
    entries: Vec<(f64, f64)>,
}

impl ValueHistogram {
    pub fn from_pairs<I: IntoIterator<Item = (f64, f64)>>(pairs: I) -> Self {
        let mut raw: Vec<(f64, f64)> = pairs.into_iter().filter(|&(_, w)| w > 0.0).collect();
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut entries: Vec<(f64, f64)> = Vec::with_capacity(raw.len());
        let mut i = 0;
        while i < raw.len() {
            let v = raw[i].0;
            let mut j = i;
            while j < raw.len() && raw[j].0 == v {
                j += 1;
            }
            let w = if j - i == 1 {
                raw[i].1
            } else {
                compensated_sum(raw[i..j].iter().map(|e| e.1))
            };
            entries.push((v, w));
            i = j;
        }
        Self { entries }
    }

    /// Histogram of equally weighted samples.
    pub fn from_samples(values: &[f64], weight: f64) -> Self {
        Self::from_pairs(values.iter().map(|&v| (v, weight)))
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_measure(&self) -> f64 {
        compensated_sum(self.entries.iter().map(|e| e.1))
    }

    /// True when the function is constant on the cube.
    pub fn is_constant(&self) -> bool {
        self.entries.len() <= 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consolidates_and_sorts() {
        let h = ValueHistogram::from_pairs([(2.0, 0.25), (-1.0, 0.25), (2.0, 0.5), (3.0, 0.0)]);
        assert_eq!(h.entries(), &[(-1.0, 0.25), (2.0, 0.75)]);
        assert_eq!(h.total_measure(), 1.0);
        assert!(!h.is_constant());
    }
}
