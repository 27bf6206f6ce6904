//! Composite dimension scores across analysis units.
//!
//! Each measure column is standardized across units, then pairs of oriented
//! columns are averaged:
//!
//! | dimension      | components                                   |
//! |----------------|----------------------------------------------|
//! | collectivism   | clustering coefficient, multiple-link ratio  |
//! | extraversion   | self-loop ratio, −anonymity ratio            |
//! | boldness       | self-loop ratio, speed                       |
//! | egalitarianism | −gini, pareto ratio                          |

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measures::MeasureVector;

#[derive(Debug, Error, PartialEq)]
pub enum DimensionError {
    #[error("need at least 2 units to standardize, got {0}")]
    TooFewUnits(usize),
    #[error("duplicate unit name {0:?}")]
    DuplicateUnit(String),
    #[error("unknown dimension {0:?} (expected collectivism, extraversion, boldness or egalitarianism)")]
    UnknownDimension(String),
    #[error("component weights for {0} must be non-negative and not both zero")]
    InvalidWeights(Dimension),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Collectivism,
    Extraversion,
    Boldness,
    Egalitarianism,
}

impl Dimension {
    pub const ALL: [Dimension; 4] = [
        Dimension::Collectivism,
        Dimension::Extraversion,
        Dimension::Boldness,
        Dimension::Egalitarianism,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dimension::Collectivism => "collectivism",
            Dimension::Extraversion => "extraversion",
            Dimension::Boldness => "boldness",
            Dimension::Egalitarianism => "egalitarianism",
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Dimension {
    type Err = DimensionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Dimension::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| DimensionError::UnknownDimension(s.to_owned()))
    }
}

/// Measures for several named units.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitMeasureTable {
    units: Vec<(String, MeasureVector)>,
}

impl UnitMeasureTable {
    pub fn new(units: Vec<(String, MeasureVector)>) -> Result<Self, DimensionError> {
        if units.len() < 2 {
            return Err(DimensionError::TooFewUnits(units.len()));
        }
        let mut seen = HashSet::new();
        for (name, _) in &units {
            if !seen.insert(name.as_str()) {
                return Err(DimensionError::DuplicateUnit(name.clone()));
            }
        }
        Ok(UnitMeasureTable { units })
    }

    pub fn units(&self) -> &[(String, MeasureVector)] {
        &self.units
    }

    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    fn column(&self, f: impl Fn(&MeasureVector) -> f64) -> Vec<f64> {
        self.units.iter().map(|(_, m)| f(m)).collect()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DimensionScores {
    pub collectivism: f64,
    pub extraversion: f64,
    pub boldness: f64,
    pub egalitarianism: f64,
}

impl DimensionScores {
    pub fn get(&self, d: Dimension) -> f64 {
        match d {
            Dimension::Collectivism => self.collectivism,
            Dimension::Extraversion => self.extraversion,
            Dimension::Boldness => self.boldness,
            Dimension::Egalitarianism => self.egalitarianism,
        }
    }

    pub fn to_array(&self) -> [f64; 4] {
        Dimension::ALL.map(|d| self.get(d))
    }
}

/// Relative weights of the two components of each dimension. The default
/// is an equal-weight mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionWeights {
    pub collectivism: [f64; 2],
    pub extraversion: [f64; 2],
    pub boldness: [f64; 2],
    pub egalitarianism: [f64; 2],
}

impl Default for DimensionWeights {
    fn default() -> Self {
        DimensionWeights {
            collectivism: [1.0, 1.0],
            extraversion: [1.0, 1.0],
            boldness: [1.0, 1.0],
            egalitarianism: [1.0, 1.0],
        }
    }
}

impl DimensionWeights {
    fn get(&self, d: Dimension) -> [f64; 2] {
        match d {
            Dimension::Collectivism => self.collectivism,
            Dimension::Extraversion => self.extraversion,
            Dimension::Boldness => self.boldness,
            Dimension::Egalitarianism => self.egalitarianism,
        }
    }

    fn validate(&self) -> Result<(), DimensionError> {
        for d in Dimension::ALL {
            let [a, b] = self.get(d);
            if !(a >= 0.0 && b >= 0.0 && a + b > 0.0 && (a + b).is_finite()) {
                return Err(DimensionError::InvalidWeights(d));
            }
        }
        Ok(())
    }
}

/// Population z-scores. A zero-variance sequence maps to all zeros.
pub fn zscore(values: &[f64]) -> Result<Vec<f64>, DimensionError> {
    if values.len() < 2 {
        return Err(DimensionError::TooFewUnits(values.len()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let sd = var.sqrt();
    if sd == 0.0 || !sd.is_finite() {
        return Ok(vec![0.0; values.len()]);
    }
    Ok(values.iter().map(|x| (x - mean) / sd).collect())
}

/// Per-unit dimension scores, in table order.
pub fn dimension_scores(table: &UnitMeasureTable) -> Result<Vec<(String, DimensionScores)>, DimensionError> {
    dimension_scores_weighted(table, &DimensionWeights::default())
}

pub fn dimension_scores_weighted(
    table: &UnitMeasureTable,
    weights: &DimensionWeights,
) -> Result<Vec<(String, DimensionScores)>, DimensionError> {
    weights.validate()?;
    let z = |f: fn(&MeasureVector) -> f64| zscore(&table.column(f));
    let clustering = z(|m| m.clustering_coefficient)?;
    let multi = z(|m| m.multiple_link_ratio)?;
    let self_loop = z(|m| m.self_loop_ratio)?;
    let anonymity = z(|m| m.anonymity_ratio)?;
    let speed = z(|m| m.speed)?;
    let gini = z(|m| m.gini)?;
    let pareto = z(|m| m.pareto_ratio)?;

    let combine = |d: Dimension, a: f64, b: f64| {
        let [wa, wb] = weights.get(d);
        (wa * a + wb * b) / (wa + wb)
    };
    Ok(table
        .units
        .iter()
        .enumerate()
        .map(|(i, (name, _))| {
            let scores = DimensionScores {
                collectivism: combine(Dimension::Collectivism, clustering[i], multi[i]),
                extraversion: combine(Dimension::Extraversion, self_loop[i], -anonymity[i]),
                boldness: combine(Dimension::Boldness, self_loop[i], speed[i]),
                egalitarianism: combine(Dimension::Egalitarianism, -gini[i], pareto[i]),
            };
            (name.clone(), scores)
        })
        .collect())
}

/// Unit names by descending score on `dimension`; ties go to the
/// lexicographically smaller name.
pub fn rank(scores: &[(String, DimensionScores)], dimension: Dimension) -> Vec<String> {
    let mut order: Vec<&(String, DimensionScores)> = scores.iter().collect();
    order.sort_by(|(na, a), (nb, b)| {
        b.get(dimension)
            .total_cmp(&a.get(dimension))
            .then_with(|| na.cmp(nb))
    });
    order.into_iter().map(|(n, _)| n.clone()).collect()
}

/// [`rank`] with the dimension given by name.
pub fn rank_by_name(
    scores: &[(String, DimensionScores)],
    dimension: &str,
) -> Result<Vec<String>, DimensionError> {
    Ok(rank(scores, dimension.parse()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mv(f: impl FnOnce(&mut MeasureVector)) -> MeasureVector {
        let mut m = MeasureVector::default();
        f(&mut m);
        m
    }

    #[test]
    fn zscore_examples() {
        assert_eq!(zscore(&[3.0, 7.0]).unwrap(), [-1.0, 1.0]);
        assert_eq!(zscore(&[7.0, 3.0]).unwrap(), [1.0, -1.0]);
        assert_eq!(zscore(&[2.5; 4]).unwrap(), [0.0; 4]);
        let z = zscore(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let r2 = std::f64::consts::SQRT_2;
        for (a, b) in z.iter().zip([-r2, -r2 / 2.0, 0.0, r2 / 2.0, r2]) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
        assert_eq!(zscore(&[1.0]), Err(DimensionError::TooFewUnits(1)));
    }

    #[test]
    fn two_units_collectivism() {
        let table = UnitMeasureTable::new(vec![
            ("U1".into(), mv(|m| {
                m.clustering_coefficient = 0.6;
                m.multiple_link_ratio = 0.3;
            })),
            ("U2".into(), mv(|m| {
                m.clustering_coefficient = 0.2;
                m.multiple_link_ratio = 0.1;
            })),
        ])
        .unwrap();
        let s = dimension_scores(&table).unwrap();
        assert!((s[0].1.collectivism - 1.0).abs() < 1e-12);
        assert!((s[1].1.collectivism + 1.0).abs() < 1e-12);
        // every other column constant
        assert_eq!(s[0].1.boldness, 0.0);
    }

    #[test]
    fn egalitarianism_orientation() {
        let table = UnitMeasureTable::new(vec![
            ("a".into(), mv(|m| { m.gini = 0.9; m.pareto_ratio = 0.1; })),
            ("b".into(), mv(|m| { m.gini = 0.5; m.pareto_ratio = 0.3; })),
            ("c".into(), mv(|m| { m.gini = 0.2; m.pareto_ratio = 0.2; })),
        ])
        .unwrap();
        let s = dimension_scores(&table).unwrap();
        assert!(s[0].1.egalitarianism < s[1].1.egalitarianism);
        assert!(s[0].1.egalitarianism < s[2].1.egalitarianism);
        assert_eq!(rank(&s, Dimension::Egalitarianism).last().unwrap(), "a");
    }

    #[test]
    fn three_unit_recomputation() {
        let vals = [
            (0.5, 0.2, 0.4, 0.1, 0.3, 0.6, 0.2),
            (0.3, 0.4, 0.6, 0.3, 0.5, 0.5, 0.3),
            (0.1, 0.3, 0.2, 0.5, 0.4, 0.7, 0.1),
        ];
        let units = vals
            .iter()
            .enumerate()
            .map(|(i, &(cc, ml, sl, an, sp, g, p))| {
                (format!("u{i}"), mv(|m| {
                    m.clustering_coefficient = cc;
                    m.multiple_link_ratio = ml;
                    m.self_loop_ratio = sl;
                    m.anonymity_ratio = an;
                    m.speed = sp;
                    m.gini = g;
                    m.pareto_ratio = p;
                }))
            })
            .collect();
        let s = dimension_scores(&UnitMeasureTable::new(units).unwrap()).unwrap();

        // spreadsheet-style: mean, population sd, standardized, averaged
        fn z(col: [f64; 3]) -> [f64; 3] {
            let m = (col[0] + col[1] + col[2]) / 3.0;
            let sd = (((col[0] - m).powi(2) + (col[1] - m).powi(2) + (col[2] - m).powi(2)) / 3.0).sqrt();
            col.map(|x| (x - m) / sd)
        }
        let col = |k: usize| -> [f64; 3] {
            let pick = |v: &(f64, f64, f64, f64, f64, f64, f64)| match k {
                0 => v.0, 1 => v.1, 2 => v.2, 3 => v.3, 4 => v.4, 5 => v.5, _ => v.6,
            };
            [pick(&vals[0]), pick(&vals[1]), pick(&vals[2])]
        };
        let (cc, ml, sl, an, sp, g, p) = (z(col(0)), z(col(1)), z(col(2)), z(col(3)), z(col(4)), z(col(5)), z(col(6)));
        for i in 0..3 {
            let d = s[i].1;
            assert!((d.collectivism - (cc[i] + ml[i]) / 2.0).abs() < 1e-12);
            assert!((d.extraversion - (sl[i] - an[i]) / 2.0).abs() < 1e-12);
            assert!((d.boldness - (sl[i] + sp[i]) / 2.0).abs() < 1e-12);
            assert!((d.egalitarianism - (p[i] - g[i]) / 2.0).abs() < 1e-12);
        }
        for dim in Dimension::ALL {
            let sum: f64 = s.iter().map(|(_, d)| d.get(dim)).sum();
            assert!(sum.abs() < 1e-9);
        }
    }

    #[test]
    fn weights_shift_composite() {
        let table = UnitMeasureTable::new(vec![
            ("a".into(), mv(|m| { m.self_loop_ratio = 1.0; m.speed = 0.0; })),
            ("b".into(), mv(|m| { m.self_loop_ratio = 0.0; m.speed = 1.0; })),
        ])
        .unwrap();
        let w = DimensionWeights {
            boldness: [3.0, 1.0],
            ..DimensionWeights::default()
        };
        let s = dimension_scores_weighted(&table, &w).unwrap();
        assert_eq!(s[0].1.boldness, 0.5);
        let bad = DimensionWeights {
            boldness: [0.0, 0.0],
            ..DimensionWeights::default()
        };
        assert!(dimension_scores_weighted(&table, &bad).is_err());
    }

    #[test]
    fn ranking() {
        let s = vec![
            ("U1".to_string(), DimensionScores { boldness: 1.0, ..Default::default() }),
            ("U2".to_string(), DimensionScores { boldness: -1.0, ..Default::default() }),
        ];
        assert_eq!(rank(&s, Dimension::Boldness), ["U1", "U2"]);
        let tie = vec![
            ("U_b".to_string(), DimensionScores::default()),
            ("U_a".to_string(), DimensionScores::default()),
        ];
        assert_eq!(rank(&tie, Dimension::Collectivism), ["U_a", "U_b"]);
        assert_eq!(rank_by_name(&s, "Boldness").unwrap(), ["U1", "U2"]);
        assert!(matches!(
            rank_by_name(&s, "openness"),
            Err(DimensionError::UnknownDimension(_))
        ));
    }

    #[test]
    fn table_validation() {
        assert_eq!(
            UnitMeasureTable::new(vec![("a".into(), MeasureVector::default())]),
            Err(DimensionError::TooFewUnits(1))
        );
        assert!(matches!(
            UnitMeasureTable::new(vec![
                ("a".into(), MeasureVector::default()),
                ("a".into(), MeasureVector::default())
            ]),
            Err(DimensionError::DuplicateUnit(_))
        ));
    }
}
