//! Committees of multiclass SVMs combined per pixel by simple or weighted majority vote.
//!
//! Fusion happens on class maps: each member classifies the raster on its own,
//! then every pixel takes the vote over the members' labels.

use serde::{Deserialize, Serialize};

use crate::classes::UNCLASSIFIED;
use crate::data_io::{ClassRaster, Raster, SampleSet};
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::multiclass::{train_multiclass, MulticlassModel};
use crate::svm::SolverSettings;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TieBreak {
    /// The tied label predicted by the earliest-listed member wins.
    #[default]
    #[serde(rename = "first-listed-member")]
    FirstListedMember,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VoteRecord {
    pub per_member: Vec<usize>,
    pub winner: usize,
    pub was_tie: bool,
}

/// Simple majority: every member counts once.
pub fn vote_simple(predictions: &[usize], tie_break: TieBreak) -> Result<VoteRecord> {
    tally_votes(predictions, |_| 1.0, tie_break)
}

/// Weighted majority: the class with the largest summed member weight wins.
pub fn vote_weighted(
    predictions: &[usize],
    weights: &[f64],
    tie_break: TieBreak,
) -> Result<VoteRecord> {
    check_weights(weights, predictions.len())?;
    tally_votes(predictions, |m| weights[m], tie_break)
}

pub(crate) fn check_weights(weights: &[f64], members: usize) -> Result<()> {
    if weights.len() != members {
        return Err(Error::invalid(format!(
            "{} weights for {members} members",
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
        return Err(Error::invalid(format!(
            "member weights must be positive, got {w}"
        )));
    }
    Ok(())
}

fn tally_votes(
    predictions: &[usize],
    weight: impl Fn(usize) -> f64,
    tie_break: TieBreak,
) -> Result<VoteRecord> {
    if predictions.is_empty() {
        return Err(Error::invalid("cannot vote over zero predictions"));
    }
    // Labels in first-appearance (member) order, with their accumulated weight.
    let mut scores: Vec<(usize, f64)> = Vec::with_capacity(predictions.len());
    for (member, &label) in predictions.iter().enumerate() {
        match scores.iter_mut().find(|(l, _)| *l == label) {
            Some((_, s)) => *s += weight(member),
            None => scores.push((label, weight(member))),
        }
    }
    let top = scores
        .iter()
        .map(|&(_, s)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    let tied = scores.iter().filter(|&&(_, s)| s == top).count();
    let winner = match tie_break {
        TieBreak::FirstListedMember => scores.iter().find(|&&(_, s)| s == top).map(|&(l, _)| l),
    }
    .expect("at least one label scored");
    Ok(VoteRecord {
        per_member: predictions.to_vec(),
        winner,
        was_tie: tied > 1,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleMember {
    pub name: String,
    pub model: MulticlassModel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleModel {
    pub members: Vec<EnsembleMember>,
    pub weights: Option<Vec<f64>>,
    pub tie_break: TieBreak,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MemberSpec {
    pub name: String,
    pub kernel: Kernel,
    pub c: f64,
}

impl MemberSpec {
    pub fn new(name: impl Into<String>, kernel: Kernel, c: f64) -> Self {
        MemberSpec {
            name: name.into(),
            kernel,
            c,
        }
    }
}

/// Linear, RBF and quadratic members, in that order.
pub fn default_members(c: f64, gamma: f64) -> Vec<MemberSpec> {
    vec![
        MemberSpec::new("linear", Kernel::Linear, c),
        MemberSpec::new("rbf", Kernel::Rbf { gamma }, c),
        MemberSpec::new("quadratic", Kernel::quadratic(), c),
    ]
}

/// Trains each member independently on the same samples.
pub fn train_ensemble(
    samples: &SampleSet,
    specs: &[MemberSpec],
    settings: &SolverSettings,
) -> Result<EnsembleModel> {
    let members = specs
        .iter()
        .map(|spec| {
            train_multiclass(samples, spec.kernel, spec.c, settings)
                .map(|model| EnsembleMember {
                    name: spec.name.clone(),
                    model,
                })
                .map_err(|e| Error::Member {
                    name: spec.name.clone(),
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let ensemble = EnsembleModel {
        members,
        weights: None,
        tie_break: TieBreak::FirstListedMember,
    };
    ensemble.validate()?;
    Ok(ensemble)
}

/// Final map, each member's map, and the number of pixels decided by the tie rule.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsemblePrediction {
    pub final_map: ClassRaster,
    pub member_maps: Vec<ClassRaster>,
    pub ties: usize,
    pub unclassified: usize,
}

impl EnsembleModel {
    pub fn with_weights(mut self, weights: Option<Vec<f64>>) -> Result<Self> {
        self.weights = weights;
        self.validate()?;
        Ok(self)
    }

    pub fn names(&self) -> Vec<&str> {
        self.members.iter().map(|m| m.name.as_str()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.members.len() < 2 {
            return Err(Error::invalid("an ensemble needs at least 2 members"));
        }
        let first = &self.members[0].model;
        for (idx, m) in self.members.iter().enumerate() {
            let named = |e: Error| Error::Member {
                name: m.name.clone(),
                source: Box::new(e),
            };
            m.model.validate().map_err(named)?;
            if m.model.classes != first.classes {
                return Err(named(Error::invalid(
                    "class table differs from the first member",
                )));
            }
            if m.model.dimension() != first.dimension() {
                return Err(named(Error::DimensionMismatch {
                    expected: first.dimension(),
                    found: m.model.dimension(),
                }));
            }
            if self.members[..idx].iter().any(|o| o.name == m.name) {
                return Err(Error::invalid(format!(
                    "duplicate member name `{}`",
                    m.name
                )));
            }
        }
        if let Some(w) = &self.weights {
            check_weights(w, self.members.len())?;
        }
        Ok(())
    }

    /// Per-member predictions for one raw feature vector and their vote.
    pub fn predict_one(&self, x: &[f64]) -> Result<VoteRecord> {
        let preds = self
            .members
            .iter()
            .map(|m| {
                m.model.predict_one(x).map_err(|e| Error::Member {
                    name: m.name.clone(),
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        match &self.weights {
            Some(w) => vote_weighted(&preds, w, self.tie_break),
            None => vote_simple(&preds, self.tie_break),
        }
    }

    pub fn predict_raster(&self, raster: &Raster) -> Result<EnsemblePrediction> {
        let mut member_maps = Vec::with_capacity(self.members.len());
        let mut unclassified = 0;
        for m in &self.members {
            let out = m.model.classify_raster(raster).map_err(|e| Error::Member {
                name: m.name.clone(),
                source: Box::new(e),
            })?;
            unclassified = unclassified.max(out.unclassified);
            member_maps.push(out.map);
        }
        let (final_map, ties) =
            combine_maps(&member_maps, self.weights.as_deref(), self.tie_break)?;
        Ok(EnsemblePrediction {
            final_map,
            member_maps,
            ties,
            unclassified,
        })
    }
}

pub fn predict_ensemble(ensemble: &EnsembleModel, raster: &Raster) -> Result<EnsemblePrediction> {
    ensemble.predict_raster(raster)
}

/// Per-pixel vote over class maps. Unclassified (0) entries abstain; a pixel stays
/// unclassified only if every map leaves it so. Returns the fused map and the tie count.
pub fn combine_maps(
    maps: &[ClassRaster],
    weights: Option<&[f64]>,
    tie_break: TieBreak,
) -> Result<(ClassRaster, usize)> {
    let first = maps
        .first()
        .ok_or_else(|| Error::invalid("no class maps to combine"))?;
    for m in &maps[1..] {
        if !m.same_shape(first) {
            return Err(Error::invalid(format!(
                "class map is {}×{}, expected {}×{}",
                m.rows(),
                m.cols(),
                first.rows(),
                first.cols()
            )));
        }
        if m.classes() != first.classes() {
            return Err(Error::invalid("class maps carry different class tables"));
        }
    }
    if let Some(w) = weights {
        check_weights(w, maps.len())?;
    }
    let mut ties = 0;
    let mut values = Vec::with_capacity(first.values().len());
    let mut preds = Vec::with_capacity(maps.len());
    let mut member_weights = Vec::with_capacity(maps.len());
    for px in 0..first.values().len() {
        preds.clear();
        member_weights.clear();
        for (m, map) in maps.iter().enumerate() {
            let v = map.values()[px];
            if v != UNCLASSIFIED {
                preds.push(usize::from(v));
                member_weights.push(weights.map_or(1.0, |w| w[m]));
            }
        }
        if preds.is_empty() {
            values.push(UNCLASSIFIED);
            continue;
        }
        let record = vote_weighted(&preds, &member_weights, tie_break)?;
        ties += usize::from(record.was_tie);
        values.push(u8::try_from(record.winner).expect("codes fit in u8"));
    }
    let map = ClassRaster::new(first.rows(), first.cols(), values, first.classes().clone())?;
    Ok((map, ties))
}

/// `entry[a][b]` = fraction of pixels where maps `a` and `b` differ.
pub fn disagreement(maps: &[ClassRaster]) -> Result<Vec<Vec<f64>>> {
    if let Some(first) = maps.first() {
        if let Some(bad) = maps.iter().find(|m| !m.same_shape(first)) {
            return Err(Error::invalid(format!(
                "class map is {}×{}, expected {}×{}",
                bad.rows(),
                bad.cols(),
                first.rows(),
                first.cols()
            )));
        }
    }
    let n = maps.len();
    let mut out = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let total = maps[a].values().len();
            let differ = maps[a]
                .values()
                .iter()
                .zip(maps[b].values())
                .filter(|(x, y)| x != y)
                .count();
            let frac = differ as f64 / total as f64;
            out[a][b] = frac;
            out[b][a] = frac;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::ClassTable;

    const FIRST: TieBreak = TieBreak::FirstListedMember;

    #[test]
    fn simple_cases() {
        assert_eq!(vote_simple(&[0, 0, 0], FIRST).unwrap().winner, 0);
        let r = vote_simple(&[0, 0, 1], FIRST).unwrap();
        assert_eq!((r.winner, r.was_tie), (0, false));
        let r = vote_simple(&[0, 1, 2], FIRST).unwrap();
        assert_eq!((r.winner, r.was_tie), (0, true));
        assert_eq!(vote_simple(&[2, 1, 1], FIRST).unwrap().winner, 1);
        assert!(vote_simple(&[], FIRST).is_err());
    }

    #[test]
    fn weighted_cases() {
        assert_eq!(
            vote_weighted(&[0, 1, 1], &[5.0, 1.0, 1.0], FIRST)
                .unwrap()
                .winner,
            0
        );
        let r = vote_weighted(&[0, 1], &[1.0, 1.0], FIRST).unwrap();
        assert_eq!((r.winner, r.was_tie), (0, true));
        assert!(vote_weighted(&[0, 1], &[1.0, 0.0], FIRST).is_err());
        assert!(vote_weighted(&[0, 1], &[1.0, -2.0], FIRST).is_err());
        assert!(vote_weighted(&[0, 1], &[1.0], FIRST).is_err());
    }

    fn map(values: Vec<u8>) -> ClassRaster {
        let classes = ClassTable::numbered(5).unwrap();
        ClassRaster::new(1, values.len(), values, classes).unwrap()
    }

    #[test]
    fn combine_strict_majority_and_abstain() {
        let a = map(vec![1, 1, 0, 3]);
        let b = map(vec![1, 2, 0, 0]);
        let c = map(vec![2, 2, 0, 4]);
        let (m, ties) = combine_maps(&[a, b, c], None, FIRST).unwrap();
        assert_eq!(m.values(), [1, 2, 0, 3]);
        assert_eq!(ties, 1);
    }

    #[test]
    fn combine_rejects_mismatch() {
        let a = map(vec![1, 1]);
        let b = map(vec![1, 1, 1]);
        assert!(combine_maps(&[a, b], None, FIRST).is_err());
    }

    #[test]
    fn disagreement_cases() {
        let a = map(vec![1; 100]);
        let mut vals = vec![1; 100];
        vals[37] = 2;
        let b = map(vals);
        let c = map(vec![2; 100]);
        let d = disagreement(&[a.clone(), a.clone(), b, c]).unwrap();
        assert_eq!(d[0][1], 0.0);
        assert_eq!(d[0][2], 0.01);
        assert_eq!(d[0][3], 1.0);
        for (i, row) in d.iter().enumerate() {
            assert_eq!(row[i], 0.0);
            for (j, v) in row.iter().enumerate() {
                assert_eq!(*v, d[j][i]);
            }
        }
    }
}
