//! Surrogate IV construction: for each node, products of centered
//! transformations of its candidate IVs over all near-full subsets of the
//! candidate set. Taking products over subsets of size at least
//! |ca| - gamma + 1 keeps every surrogate valid as long as at most gamma - 1
//! candidates are invalid.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declared type of a secondary variable, controlling how it is transformed
/// into basis factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableKind {
    /// Real-valued; standardized, then raised to powers 1..=degree.
    Continuous,
    /// Values in {0, 1}; used as-is.
    Binary,
    /// Finitely many levels; dummy-encoded against the most frequent level.
    Polytomous,
}

/// Basis construction parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BasisSpec {
    /// Robustness order: surrogates stay valid with up to gamma - 1 invalid
    /// candidates. Must satisfy 1 <= gamma <= |ca|.
    pub gamma: usize,
    /// Highest power of each standardized continuous candidate.
    pub degree: u32,
    /// Hard cap on basis columns per node.
    pub max_columns: usize,
}

impl Default for BasisSpec {
    fn default() -> Self {
        Self {
            gamma: 1,
            degree: 2,
            max_columns: 256,
        }
    }
}

/// One centered transformation of a secondary coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorTransform {
    /// The raw value (binary coordinates).
    Identity,
    /// `((x - shift) / scale)^degree` (continuous coordinates).
    Power { degree: u32, shift: f64, scale: f64 },
    /// `1(x == level)` (polytomous coordinates).
    Dummy { level: f64 },
}

/// A factor `t(X_s) - center` entering a basis column as one term of the
/// product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    /// Secondary coordinate index (0-based).
    pub coord: usize,
    pub transform: FactorTransform,
    /// Estimated mean of the transformed value; a nuisance location
    /// parameter in the variance calculation.
    pub center: f64,
}

/// Total-order key identifying a nuisance mean parameter: two factors with
/// equal keys share one center estimate.
pub type FactorKey = (usize, u8, u32, u64, u64);

impl Factor {
    pub fn key(&self) -> FactorKey {
        match self.transform {
            FactorTransform::Identity => (self.coord, 0, 0, 0, 0),
            FactorTransform::Power {
                degree,
                shift,
                scale,
            } => (self.coord, 1, degree, shift.to_bits(), scale.to_bits()),
            FactorTransform::Dummy { level } => (self.coord, 2, 0, level.to_bits(), 0),
        }
    }

    /// The transformed (uncentered) value `t(x)`.
    pub fn transform_value(&self, x: f64) -> f64 {
        match self.transform {
            FactorTransform::Identity => x,
            FactorTransform::Power {
                degree,
                shift,
                scale,
            } => ((x - shift) / scale).powi(degree as i32),
            FactorTransform::Dummy { level } => f64::from(x == level),
        }
    }

    /// The centered term `t(x) - center`.
    pub fn term(&self, x: f64) -> f64 {
        self.transform_value(x) - self.center
    }
}

/// One surrogate IV: the evaluated column together with its factorization.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisColumn {
    /// Factors in ascending coordinate order; the column is their product.
    pub factors: Vec<Factor>,
    /// Evaluated column, length n.
    pub values: Vec<f64>,
}

/// Surrogate IV basis for one node.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Basis {
    pub node: usize,
    pub columns: Vec<BasisColumn>,
}

/// Subsets of `ca` of size at least `|ca| - gamma + 1`, ordered by size then
/// lexicographically.
pub fn enumerate_subsets(ca: &BTreeSet<usize>, gamma: usize) -> Result<Vec<Vec<usize>>> {
    let m = ca.len();
    if gamma == 0 || gamma > m {
        return Err(Error::GammaOutOfRange {
            gamma,
            size: m,
        });
    }
    let items: Vec<usize> = ca.iter().copied().collect();
    let min_size = m - gamma + 1;
    let mut out = Vec::new();
    for size in min_size..=m {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.iter().map(|&i| items[i]).collect());
            // next combination in lexicographic order
            let mut i = size;
            while i > 0 {
                i -= 1;
                if idx[i] != i + m - size {
                    idx[i] += 1;
                    for j in (i + 1)..size {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    idx.clear();
                }
            }
            if idx.is_empty() {
                break;
            }
        }
    }
    Ok(out)
}

/// Variant factors for one secondary coordinate.
fn coordinate_variants(x: &DMatrix<f64>, s: usize, kind: VariableKind, degree: u32)
    -> Result<Vec<Factor>> {
    let n = x.nrows() as f64;
    let col = x.column(s);
    match kind {
        VariableKind::Binary => {
            if col.iter().any(|&v| v != 0.0 && v != 1.0) {
                return Err(Error::NonBinaryValue { column: s });
            }
            let center = col.sum() / n;
            Ok(vec![Factor {
                coord: s,
                transform: FactorTransform::Identity,
                center,
            }])
        }
        VariableKind::Continuous => {
            let shift = col.sum() / n;
            let scale = (col.iter().map(|&v| (v - shift).powi(2)).sum::<f64>() / n).sqrt();
            if scale <= 0.0 {
                return Err(Error::DegenerateBasis { column: s });
            }
            let mut out = Vec::with_capacity(degree as usize);
            for d in 1..=degree {
                let transform = FactorTransform::Power {
                    degree: d,
                    shift,
                    scale,
                };
                let probe = Factor {
                    coord: s,
                    transform: transform.clone(),
                    center: 0.0,
                };
                let center =
                    col.iter().map(|&v| probe.transform_value(v)).sum::<f64>() / n;
                out.push(Factor {
                    coord: s,
                    transform,
                    center,
                });
            }
            Ok(out)
        }
        VariableKind::Polytomous => {
            // levels sorted ascending; reference = most frequent, ties to the
            // smallest level
            let mut levels: Vec<f64> = col.iter().copied().collect();
            levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
            levels.dedup();
            if levels.len() < 2 {
                return Err(Error::SingleLevel { column: s });
            }
            let count = |lvl: f64| col.iter().filter(|&&v| v == lvl).count();
            let reference = levels
                .iter()
                .copied()
                .max_by(|&a, &b| count(a).cmp(&count(b)).then(b.partial_cmp(&a).unwrap()))
                .unwrap();
            Ok(levels
                .into_iter()
                .filter(|&lvl| lvl != reference)
                .map(|lvl| {
                    let center = count(lvl) as f64 / n;
                    Factor {
                        coord: s,
                        transform: FactorTransform::Dummy { level: lvl },
                        center,
                    }
                })
                .collect())
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Builds the surrogate basis for `node` from its candidate IV set.
///
/// Columns are products, over each subset in [`enumerate_subsets`] order, of
/// one centered factor per coordinate; variant assignments iterate with the
/// last coordinate fastest.
pub fn build_basis(
    x: &DMatrix<f64>,
    kinds: &[VariableKind],
    ca: &BTreeSet<usize>,
    node: usize,
    spec: &BasisSpec,
) -> Result<Basis> {
    if kinds.len() != x.ncols() {
        return Err(Error::ShapeMismatch {
            context: format!(
                "{} kinds declared for {} secondary columns",
                kinds.len(),
                x.ncols()
            ),
        });
    }
    if ca.is_empty() {
        return Err(Error::EmptyCandidateSet { node });
    }
    if let Some(&s) = ca.iter().find(|&&s| s >= x.ncols()) {
        return Err(Error::IndexOutOfRange {
            index: s,
            limit: x.ncols(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }

    let variants: Vec<Vec<Factor>> = ca
        .iter()
        .map(|&s| coordinate_variants(x, s, kinds[s], spec.degree))
        .collect::<Result<_>>()?;
    let max_variants = variants.iter().map(Vec::len).max().unwrap_or(1) as u128;

    // Size guard before enumeration: each subset of size s yields at least
    // one and at most max_variants^s columns.
    let m = ca.len();
    if spec.gamma == 0 || spec.gamma > m {
        return Err(Error::GammaOutOfRange {
            gamma: spec.gamma,
            size: m,
        });
    }
    let mut bound: u128 = 0;
    for size in (m - spec.gamma + 1)..=m {
        bound = bound.saturating_add(
            binomial(m, size).saturating_mul(max_variants.saturating_pow(size as u32)),
        );
        if bound > (1 << 40) {
            return Err(Error::BasisTooLarge {
                node,
                size: usize::MAX,
                cap: spec.max_columns,
            });
        }
    }

    let subsets = enumerate_subsets(ca, spec.gamma)?;
    let coord_pos = |s: usize| ca.iter().position(|&c| c == s).unwrap();

    let mut columns: Vec<BasisColumn> = Vec::new();
    let n = x.nrows();
    for subset in &subsets {
        let choices: Vec<&[Factor]> = subset
            .iter()
            .map(|&s| variants[coord_pos(s)].as_slice())
            .collect();
        // odometer over variant assignments, last coordinate fastest
        let mut assign = vec![0usize; subset.len()];
        loop {
            let factors: Vec<Factor> = subset
                .iter()
                .enumerate()
                .map(|(i, _)| choices[i][assign[i]].clone())
                .collect();
            let values: Vec<f64> = (0..n)
                .map(|row| {
                    factors
                        .iter()
                        .map(|f| f.term(x[(row, f.coord)]))
                        .product()
                })
                .collect();
            columns.push(BasisColumn { factors, values });
            if columns.len() > spec.max_columns {
                return Err(Error::BasisTooLarge {
                    node,
                    size: columns.len(),
                    cap: spec.max_columns,
                });
            }
            // increment odometer
            let mut i = subset.len();
            loop {
                if i == 0 {
                    assign.clear();
                    break;
                }
                i -= 1;
                assign[i] += 1;
                if assign[i] < choices[i].len() {
                    break;
                }
                assign[i] = 0;
            }
            if assign.is_empty() {
                break;
            }
        }
    }

    for (idx, col) in columns.iter().enumerate() {
        let mean = col.values.iter().sum::<f64>() / n as f64;
        let var = col.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        if var <= 0.0 {
            return Err(Error::DegenerateBasis { column: idx });
        }
    }

    Ok(Basis { node, columns })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[usize]) -> BTreeSet<usize> {
        items.iter().copied().collect()
    }

    fn spec(gamma: usize) -> BasisSpec {
        BasisSpec {
            gamma,
            ..BasisSpec::default()
        }
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(
            enumerate_subsets(&set(&[2, 4]), 1).unwrap(),
            vec![vec![2, 4]]
        );
        assert_eq!(
            enumerate_subsets(&set(&[2, 4]), 2).unwrap(),
            vec![vec![2], vec![4], vec![2, 4]]
        );
        assert_eq!(
            enumerate_subsets(&set(&[0, 1, 2]), 2).unwrap(),
            vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 1, 2]]
        );
        assert!(matches!(
            enumerate_subsets(&set(&[0, 1]), 3),
            Err(Error::GammaOutOfRange { .. })
        ));
        assert!(matches!(
            enumerate_subsets(&set(&[0]), 0),
            Err(Error::GammaOutOfRange { .. })
        ));
    }

    #[test]
    fn binary_full_gamma_counts() {
        // m binary candidates with gamma = m give 2^m - 1 columns
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for m in 1..=4usize {
            let n = 64;
            let x = DMatrix::from_fn(n, m, |_, _| f64::from(rng.gen_bool(0.5)));
            let kinds = vec![VariableKind::Binary; m];
            let ca: BTreeSet<usize> = (0..m).collect();
            let b = build_basis(&x, &kinds, &ca, 0, &spec(m)).unwrap();
            assert_eq!(b.columns.len(), (1usize << m) - 1);
        }
    }

    #[test]
    fn binary_hand_example() {
        let x = DMatrix::from_column_slice(4, 1, &[0.0, 1.0, 1.0, 0.0]);
        let b = build_basis(&x, &[VariableKind::Binary], &set(&[0]), 0, &spec(1)).unwrap();
        assert_eq!(b.columns.len(), 1);
        assert_eq!(b.columns[0].values, vec![-0.5, 0.5, 0.5, -0.5]);
        assert_eq!(b.columns[0].factors[0].center, 0.5);
    }

    #[test]
    fn binary_product_hand_example() {
        // two coordinates, gamma = 1: single column (x1 - m1)(x2 - m2)
        let x = DMatrix::from_row_slice(4, 2, &[0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        let kinds = [VariableKind::Binary, VariableKind::Binary];
        let b = build_basis(&x, &kinds, &set(&[0, 1]), 0, &spec(1)).unwrap();
        assert_eq!(b.columns.len(), 1);
        let expect = [
            (-0.5) * 0.5,
            0.5 * 0.5,
            0.5 * (-0.5),
            (-0.5) * (-0.5),
        ];
        for (got, want) in b.columns[0].values.iter().zip(expect) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn continuous_single_coordinate_moments() {
        let x = DMatrix::from_column_slice(5, 1, &[-2.0, -1.0, 0.0, 1.0, 2.0]);
        let b = build_basis(&x, &[VariableKind::Continuous], &set(&[0]), 0, &spec(1)).unwrap();
        // degree 2 default: two columns, standardized x and centered x^2
        assert_eq!(b.columns.len(), 2);
        let n = 5.0;
        for col in &b.columns {
            let mean = col.values.iter().sum::<f64>() / n;
            assert!(mean.abs() < 1e-12, "single-factor columns are mean zero");
        }
        // first column is x standardized (mean 0, population variance 1)
        let var = b.columns[0].values.iter().map(|v| v * v).sum::<f64>() / n;
        assert!((var - 1.0).abs() < 1e-12);
        // second column is xstd^2 - mean(xstd^2) = xstd^2 - 1
        for (c2, c1) in b.columns[1].values.iter().zip(&b.columns[0].values) {
            assert!((c2 - (c1 * c1 - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn polytomous_dummy_encoding() {
        // levels {0,1,2}, level 1 most frequent -> dummies for 0 and 2
        let x = DMatrix::from_column_slice(6, 1, &[0.0, 1.0, 1.0, 2.0, 1.0, 2.0]);
        let b = build_basis(&x, &[VariableKind::Polytomous], &set(&[0]), 0, &spec(1)).unwrap();
        assert_eq!(b.columns.len(), 2);
        let f0 = &b.columns[0].factors[0];
        let f2 = &b.columns[1].factors[0];
        assert_eq!(f0.transform, FactorTransform::Dummy { level: 0.0 });
        assert_eq!(f2.transform, FactorTransform::Dummy { level: 2.0 });
        assert!((f0.center - 1.0 / 6.0).abs() < 1e-15);
        assert!((f2.center - 2.0 / 6.0).abs() < 1e-15);
        assert!((b.columns[0].values[0] - (1.0 - 1.0 / 6.0)).abs() < 1e-15);
        assert!((b.columns[0].values[1] - (0.0 - 1.0 / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn column_count_formula() {
        // count = sum over subsets of prod of per-coordinate variant counts
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let n = 80;
        let x = DMatrix::from_fn(n, 3, |r, c| match c {
            0 => f64::from(rng.gen_bool(0.5)),
            1 => rng.gen_range(-1.0..1.0),
            _ => (r % 4) as f64, // 4 levels, each present
        });
        let kinds = [
            VariableKind::Binary,
            VariableKind::Continuous,
            VariableKind::Polytomous,
        ];
        let ca = set(&[0, 1, 2]);
        let v = [1usize, 2, 3]; // variants: binary 1, continuous degree 2, poly 4 levels - 1
        for gamma in 1..=3usize {
            let b = build_basis(&x, &kinds, &ca, 0, &spec(gamma)).unwrap();
            let expected: usize = enumerate_subsets(&ca, gamma)
                .unwrap()
                .iter()
                .map(|s| s.iter().map(|&c| v[c]).product::<usize>())
                .sum();
            assert_eq!(b.columns.len(), expected, "gamma = {gamma}");
        }
    }

    #[test]
    fn error_paths() {
        let x = DMatrix::from_column_slice(4, 1, &[0.0, 1.0, 2.0, 1.0]);
        assert!(matches!(
            build_basis(&x, &[VariableKind::Binary], &set(&[0]), 0, &spec(1)),
            Err(Error::NonBinaryValue { column: 0 })
        ));
        let constant = DMatrix::from_column_slice(4, 1, &[3.0; 4]);
        assert!(matches!(
            build_basis(&constant, &[VariableKind::Continuous], &set(&[0]), 0, &spec(1)),
            Err(Error::DegenerateBasis { .. })
        ));
        assert!(matches!(
            build_basis(&constant, &[VariableKind::Polytomous], &set(&[0]), 0, &spec(1)),
            Err(Error::SingleLevel { column: 0 })
        ));
        assert!(matches!(
            build_basis(&x, &[VariableKind::Polytomous], &BTreeSet::new(), 5, &spec(1)),
            Err(Error::EmptyCandidateSet { node: 5 })
        ));
        let tight = BasisSpec {
            gamma: 3,
            degree: 2,
            max_columns: 4,
        };
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        let wide = DMatrix::from_fn(32, 3, |_, _| rng.gen_range(-1.0..1.0));
        let kinds = vec![VariableKind::Continuous; 3];
        assert!(matches!(
            build_basis(&wide, &kinds, &set(&[0, 1, 2]), 1, &tight),
            Err(Error::BasisTooLarge { node: 1, .. })
        ));
    }

    #[test]
    fn factor_keys_dedup_repeated_use() {
        // the same coordinate appearing in several columns yields one key
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let x = DMatrix::from_fn(50, 2, |_, _| f64::from(rng.gen_bool(0.5)));
        let kinds = [VariableKind::Binary, VariableKind::Binary];
        let b = build_basis(&x, &kinds, &set(&[0, 1]), 0, &spec(2)).unwrap();
        let keys: BTreeSet<FactorKey> = b
            .columns
            .iter()
            .flat_map(|c| c.factors.iter().map(Factor::key))
            .collect();
        assert_eq!(keys.len(), 2);
    }
}
