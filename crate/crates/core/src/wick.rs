//! Pair partitions, crossings and vacuum moments `ε(G_{i(1)}⋯G_{i(m)})` of the
//! field operators `G_i = d_i + d_i*`.
//!
//! Positions and letters are 0-based throughout; `Display` impls print them
//! 1-based.

use std::fmt;

use crate::certificate::{Certificate, Tolerances};
use crate::error::{Error, Result};
use crate::fock::{DeformationTensor, FockScene, FockVector, QSpec};
use crate::linalg::{C64, ZERO};

/// Largest word length for which pairings are enumerated.
pub const MAX_PAIRING_LENGTH: usize = 16;

/// A perfect matching of `{0..2r}` stored as pairs `(a_k, z_k)` with
/// `a_k < z_k` and `a_1 < a_2 < …`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairPartition {
    pairs: Vec<(usize, usize)>,
}

impl PairPartition {
    pub fn new(pairs: Vec<(usize, usize)>) -> Result<Self> {
        let m = pairs.len() * 2;
        let mut seen = vec![false; m];
        for (k, &(a, z)) in pairs.iter().enumerate() {
            if a >= z {
                return Err(Error::InvalidArgument(format!("pair ({a}, {z}) is not increasing")));
            }
            if k > 0 && pairs[k - 1].0 >= a {
                return Err(Error::InvalidArgument("pair openers must increase".into()));
            }
            for p in [a, z] {
                if p >= m || seen[p] {
                    return Err(Error::InvalidArgument(format!("position {p} repeated or out of range")));
                }
                seen[p] = true;
            }
        }
        Ok(PairPartition { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Number of points `2r`.
    pub fn points(&self) -> usize {
        self.pairs.len() * 2
    }

    /// Pair indices `(k, l)` with `a_k < a_l < z_k < z_l`.
    pub fn crossings(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (k, &(ak, zk)) in self.pairs.iter().enumerate() {
            for (l, &(al, zl)) in self.pairs.iter().enumerate().skip(k + 1) {
                if ak < al && al < zk && zk < zl {
                    out.push((k, l));
                }
            }
        }
        out
    }

    /// `Π_k δ_{i(a_k) i(z_k)} · Π_{(k,l) crossing} q_{i(a_l) i(a_k)}`.
    ///
    /// The crossing factor carries the letter of the later opener first. For
    /// symmetric `q` the order is immaterial; for Hermitian `q` this is the
    /// orientation produced by `⟨Ω, G_{i(1)}⋯G_{i(m)} Ω⟩_T`.
    pub fn q_weight(&self, word: &[usize], spec: &QSpec) -> Result<C64> {
        if word.len() != self.points() {
            return Err(Error::DimensionMismatch(format!(
                "word of length {} for a pairing of {} points",
                word.len(),
                self.points()
            )));
        }
        if self.pairs.iter().any(|&(a, z)| word[a] != word[z]) {
            return Ok(ZERO);
        }
        Ok(self
            .crossings()
            .into_iter()
            .map(|(k, l)| spec.get(word[self.pairs[l].0], word[self.pairs[k].0]))
            .product())
    }
}

impl fmt::Display for PairPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(a, z)| format!("({},{})", a + 1, z + 1)).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

fn check_length(m: usize) -> Result<()> {
    if m > MAX_PAIRING_LENGTH {
        return Err(Error::SizeBudget {
            what: "pairing word length",
            needed: m,
            limit: MAX_PAIRING_LENGTH,
        });
    }
    Ok(())
}

/// Depth-first walk over pairings: the smallest unpaired point is matched
/// with each admissible later point in ascending order.
fn walk(
    partner: &mut [Option<usize>],
    pairs: &mut Vec<(usize, usize)>,
    admissible: &dyn Fn(usize, usize) -> bool,
    visit: &mut dyn FnMut(&[(usize, usize)]),
) {
    let Some(a) = partner.iter().position(|p| p.is_none()) else {
        visit(pairs);
        return;
    };
    for z in a + 1..partner.len() {
        if partner[z].is_some() || !admissible(a, z) {
            continue;
        }
        partner[a] = Some(z);
        partner[z] = Some(a);
        pairs.push((a, z));
        walk(partner, pairs, admissible, visit);
        pairs.pop();
        partner[a] = None;
        partner[z] = None;
    }
}

/// All `(m−1)!!` pairings of `m` points in canonical order.
pub fn pair_partitions(m: usize) -> Result<Vec<PairPartition>> {
    if m % 2 == 1 {
        return Err(Error::InvalidArgument(format!("no pairings of an odd number of points ({m})")));
    }
    check_length(m)?;
    let mut out = Vec::new();
    let mut partner = vec![None; m];
    walk(&mut partner, &mut Vec::new(), &|_, _| true, &mut |pairs| {
        out.push(PairPartition { pairs: pairs.to_vec() })
    });
    Ok(out)
}

/// `(m−1)!! = 1·3·5⋯(m−1)`.
pub fn double_factorial_odd(m: usize) -> u64 {
    (1..m as u64).step_by(2).product()
}

/// A word `i(1..m)` over the basis of `H` together with its deformation.
#[derive(Debug, Clone)]
pub struct MomentQuery {
    word: Vec<usize>,
    spec: QSpec,
}

impl MomentQuery {
    pub fn new(word: Vec<usize>, spec: QSpec) -> Result<Self> {
        if let Some(&bad) = word.iter().find(|&&i| i >= spec.dim()) {
            return Err(Error::InvalidGenerator {
                index: bad,
                count: spec.dim(),
            });
        }
        Ok(MomentQuery { word, spec })
    }

    pub fn word(&self) -> &[usize] {
        &self.word
    }

    pub fn spec(&self) -> &QSpec {
        &self.spec
    }

    /// Diagram route: sum of `q_weight` over all pairings. Pairings joining
    /// different letters are pruned during enumeration.
    pub fn moment(&self) -> Result<C64> {
        let m = self.word.len();
        check_length(m)?;
        if m % 2 == 1 {
            return Ok(ZERO);
        }
        let word = &self.word;
        let mut total = ZERO;
        let mut partner = vec![None; m];
        walk(&mut partner, &mut Vec::new(), &|a, z| word[a] == word[z], &mut |pairs| {
            let v = PairPartition { pairs: pairs.to_vec() };
            total += v.q_weight(word, &self.spec).expect("length checked");
        });
        Ok(total)
    }

    /// Matrix route in `scene`; see [`moment_matrix`].
    pub fn moment_matrix(&self, scene: &FockScene) -> Result<C64> {
        moment_matrix(&self.word, scene)
    }

    /// `|diagram − matrix|` against the residual tolerance.
    pub fn compare(&self, scene: &FockScene) -> Result<Certificate> {
        let diagram = self.moment()?;
        let matrix = self.moment_matrix(scene)?;
        Ok(Certificate::at_most(
            format!("moment {}", format_word(&self.word)),
            (diagram - matrix).norm(),
            scene.tolerances().residual,
        )
        .with("diagram", format_complex(diagram))
        .with("matrix", format_complex(matrix)))
    }
}

pub fn format_word(word: &[usize]) -> String {
    let parts: Vec<String> = word.iter().map(|i| (i + 1).to_string()).collect();
    format!("({})", parts.join(","))
}

pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

/// Applies `G_{i(m)}`, …, `G_{i(1)}` to the vacuum.
fn apply_word(word: &[usize], scene: &FockScene) -> FockVector {
    let mut fields: Vec<Option<_>> = vec![None; scene.dim()];
    let mut v = scene.vacuum();
    for &i in word.iter().rev() {
        let g = fields[i].get_or_insert_with(|| scene.field(i));
        v = g.apply(&v);
    }
    v
}

/// `⟨Ω, G_{i(1)}⋯G_{i(m)} Ω⟩_T` by matrix products. Exact as long as the
/// cap is at least `m/2`, since no contributing path climbs higher.
pub fn moment_matrix(word: &[usize], scene: &FockScene) -> Result<C64> {
    if let Some(&bad) = word.iter().find(|&&i| i >= scene.dim()) {
        return Err(Error::InvalidGenerator {
            index: bad,
            count: scene.dim(),
        });
    }
    let needed = word.len() / 2;
    if scene.cap() < needed {
        return Err(Error::InsufficientLevels {
            cap: scene.cap(),
            needed,
        });
    }
    // Level 0 carries P⁽⁰⁾ = 1, so the raw component is the T-inner product.
    Ok(apply_word(word, scene).levels[0][0])
}

/// All words of length `len` over `d` letters in lexicographic order.
pub fn all_words(d: usize, len: usize) -> Vec<Vec<usize>> {
    let count = d.pow(len as u32);
    (0..count)
        .map(|mut idx| {
            let mut w = vec![0; len];
            for slot in (0..len).rev() {
                w[slot] = idx % d;
                idx /= d;
            }
            w
        })
        .collect()
}

/// Structural and empirical trace checks for the vacuum state.
#[derive(Debug, Clone)]
pub struct TracialityReport {
    /// `max |t^{dc}_{ab} − t^{cb}_{da}|`.
    pub structural: Certificate,
    /// `max |ε(AB) − ε(BA)|` over monomials of total degree at most `max_degree`.
    pub empirical: Certificate,
    /// Monomials `(A, B)` attaining the empirical maximum.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
}

impl TracialityReport {
    /// Structural pass implies empirical pass.
    pub fn consistent(&self) -> bool {
        !self.structural.passed || self.empirical.passed
    }
}

/// Exhaustive over all words `w = AB` of length ≤ `max_degree` and all cut
/// points, comparing `ε(AB)` with `ε(BA)` in a scene of cap `max_degree/2`.
pub fn traciality_check(tensor: &DeformationTensor, max_degree: usize, tol: &Tolerances) -> Result<TracialityReport> {
    let structural_value = tensor.cyclicity_residual();
    let structural = Certificate::at_most(
        "cyclic coefficients t^{dc}_{ab} = t^{cb}_{da}",
        structural_value,
        tol.validation_for(tensor.norm()),
    );
    let scene = FockScene::build(tensor.clone(), max_degree / 2, tol)?;
    let d = tensor.dim();
    let mut worst: f64 = 0.0;
    let mut witness = None;
    for len in (2..=max_degree).step_by(2) {
        for w in all_words(d, len) {
            let base = moment_matrix(&w, &scene)?;
            for cut in 1..len {
                let rotated: Vec<usize> = w[cut..].iter().chain(&w[..cut]).copied().collect();
                let other = moment_matrix(&rotated, &scene)?;
                let diff = (base - other).norm();
                if diff > worst {
                    worst = diff;
                    witness = Some((w[..cut].to_vec(), w[cut..].to_vec()));
                }
            }
        }
    }
    let mut empirical = Certificate::at_most("vacuum trace ε(AB) = ε(BA)", worst, tol.residual)
        .with("max_degree", max_degree);
    if let Some((a, b)) = &witness {
        empirical = empirical.with("witness", format!("A = {}, B = {}", format_word(a), format_word(b)));
    }
    Ok(TracialityReport {
        structural,
        empirical,
        witness,
    })
}

/// `ε(G_i G_i) = 1` for every letter, the single-pairing normalisation.
pub fn second_moment(spec: &QSpec, i: usize) -> Result<C64> {
    MomentQuery::new(vec![i, i], spec.clone())?.moment()
}

/// Sum of the moment over all words `G_{i} G_{i}` for `i < m`.
pub fn trace_of_square_sum(spec: &QSpec, m: usize) -> Result<C64> {
    (0..m).map(|i| second_moment(spec, i)).try_fold(ZERO, |acc, x| Ok(acc + x?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, CMat, ONE};

    fn pp(pairs: &[(usize, usize)]) -> PairPartition {
        PairPartition::new(pairs.to_vec()).unwrap()
    }

    #[test]
    fn pairing_counts() {
        assert_eq!(pair_partitions(2).unwrap(), vec![pp(&[(0, 1)])]);
        assert_eq!(pair_partitions(4).unwrap().len(), 3);
        assert_eq!(pair_partitions(6).unwrap().len(), 15);
        assert_eq!(pair_partitions(0).unwrap().len(), 1);
        assert!(pair_partitions(3).is_err());
        assert!(pair_partitions(18).is_err());
    }

    #[test]
    fn canonical_order_m4() {
        let all = pair_partitions(4).unwrap();
        assert_eq!(all[0], pp(&[(0, 1), (2, 3)]));
        assert_eq!(all[1], pp(&[(0, 2), (1, 3)]));
        assert_eq!(all[2], pp(&[(0, 3), (1, 2)]));
    }

    #[test]
    fn crossing_examples() {
        assert!(pp(&[(0, 1), (2, 3)]).crossings().is_empty());
        assert_eq!(pp(&[(0, 2), (1, 3)]).crossings(), vec![(0, 1)]);
        assert_eq!(pp(&[(0, 3), (1, 4), (2, 5)]).crossings().len(), 3);
        // the pairing {(1,4),(2,3)} is nested
        assert!(pp(&[(0, 3), (1, 2)]).crossings().is_empty());
    }

    #[test]
    fn invalid_pairings() {
        assert!(PairPartition::new(vec![(0, 3), (1, 3)]).is_err());
        assert!(PairPartition::new(vec![(1, 0)]).is_err());
        assert!(PairPartition::new(vec![(1, 2), (0, 3)]).is_err());
    }

    #[test]
    fn weights() {
        let spec = QSpec::constant(2, 0.3).unwrap();
        assert_eq!(pp(&[(0, 1)]).q_weight(&[0, 0], &spec).unwrap(), ONE);
        assert_eq!(pp(&[(0, 2), (1, 3)]).q_weight(&[0, 0, 0, 0], &spec).unwrap(), c(0.3));
        assert_eq!(pp(&[(0, 2), (1, 3)]).q_weight(&[0, 1, 1, 0], &spec).unwrap(), ZERO);
    }

    #[test]
    fn scalar_fourth_moment() {
        let spec = QSpec::constant(1, 0.3).unwrap();
        let q = MomentQuery::new(vec![0; 4], spec.clone()).unwrap();
        assert_eq!(q.moment().unwrap(), c(2.0) + c(0.3));
        let scene = FockScene::build(DeformationTensor::from_q(&spec), 2, &Tolerances::default()).unwrap();
        assert!((q.moment_matrix(&scene).unwrap() - c(2.3)).norm() < 1e-14);
        assert!(q.compare(&scene).unwrap().passed);
    }

    #[test]
    fn odd_words_vanish() {
        let spec = QSpec::constant(2, 0.5).unwrap();
        assert_eq!(MomentQuery::new(vec![0, 1, 0], spec).unwrap().moment().unwrap(), ZERO);
    }

    #[test]
    fn matrix_route_needs_levels() {
        let spec = QSpec::zeros(2);
        let scene = FockScene::build(DeformationTensor::from_q(&spec), 1, &Tolerances::default()).unwrap();
        let err = moment_matrix(&[0, 0, 0, 0], &scene).unwrap_err();
        assert!(matches!(err, Error::InsufficientLevels { cap: 1, needed: 2 }));
    }

    #[test]
    fn hermitian_orientation_matches_matrix() {
        let mut q = CMat::zeros(2, 2);
        q[(0, 1)] = C64::new(0.2, 0.7);
        q[(1, 0)] = C64::new(0.2, -0.7);
        let spec = QSpec::new(q).unwrap();
        let scene = FockScene::build(DeformationTensor::from_q(&spec), 2, &Tolerances::default()).unwrap();
        let query = MomentQuery::new(vec![0, 1, 0, 1], spec.clone()).unwrap();
        assert_eq!(query.moment().unwrap(), spec.get(1, 0));
        assert!(query.compare(&scene).unwrap().passed);
    }

    #[test]
    fn symmetric_q_is_tracial() {
        let mut q = CMat::zeros(2, 2);
        q[(0, 0)] = c(0.4);
        q[(0, 1)] = c(-0.6);
        q[(1, 0)] = c(-0.6);
        let report = traciality_check(
            &DeformationTensor::from_q(&QSpec::new(q).unwrap()),
            6,
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(report.structural.value, 0.0);
        assert!(report.empirical.passed);
        assert!(report.consistent());
    }

    #[test]
    fn imaginary_q_breaks_trace() {
        let mut q = CMat::zeros(2, 2);
        q[(0, 1)] = C64::new(0.0, 1.0);
        q[(1, 0)] = C64::new(0.0, -1.0);
        let report = traciality_check(
            &DeformationTensor::from_q(&QSpec::new(q).unwrap()),
            4,
            &Tolerances::default(),
        )
        .unwrap();
        assert!(!report.structural.passed);
        assert!(report.empirical.value > 1e-6);
        assert!(report.witness.is_some());
    }

    #[test]
    fn words_enumeration() {
        let w = all_words(2, 3);
        assert_eq!(w.len(), 8);
        assert_eq!(w[1], vec![0, 0, 1]);
        assert_eq!(format_word(&w[1]), "(1,1,2)");
    }
}
