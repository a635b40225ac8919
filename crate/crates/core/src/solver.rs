//! Ground-state search: exhaustive Gray-code enumeration, seeded simulated
//! annealing, and the end-to-end linear-system pipeline.

use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::congruence::{diagonalize_congruent, qr_congruence, CongruencePair};
use crate::encoding::{Assignment, EncodingSpec};
use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::qubo::{
    build_sylvester_with, build_vanilla_with, rational, BuildOptions, Decoded, LinearSystem,
    QuboModel,
};

/// Default qubit limit for exhaustive enumeration.
pub const EXHAUSTIVE_CAP: usize = 26;
/// Relative tolerance for "same energy as the minimum".
pub const ENERGY_RTOL: f64 = 1e-9;
/// A system counts as solved when `‖Ax − b‖² ≤ SOLVED_RTOL·(1 + bᵀb)`.
pub const SOLVED_RTOL: f64 = 1e-6;

fn same_energy(e: f64, best: f64) -> bool {
    (e - best).abs() <= ENERGY_RTOL * (1.0 + best.abs())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub assignment: Assignment,
    pub energy: f64,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleSet {
    /// Ascending by energy, ties broken lexicographically by assignment.
    pub samples: Vec<Sample>,
    pub best_energy: f64,
    /// `(y, x)` for every sample at the best energy, in sample order. Empty
    /// when the model has no encoding attached.
    pub decoded: Vec<Decoded>,
    /// Set when exhaustive search stopped recording ground states at its cap.
    pub truncated: bool,
}

impl SampleSet {
    fn from_counts(model: &QuboModel, counts: BTreeMap<Vec<u8>, u64>, truncated: bool) -> Result<Self> {
        let mut samples: Vec<Sample> = counts
            .into_iter()
            .map(|(bits, count)| {
                let energy = model.energy_bits(&bits);
                Sample {
                    assignment: Assignment::new(bits).expect("solver produces 0/1 bits"),
                    energy,
                    count,
                }
            })
            .collect();
        samples.sort_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| a.assignment.cmp(&b.assignment)));
        let best_energy = samples.first().map_or(f64::INFINITY, |s| s.energy);
        let decoded = if model.provenance().is_some() {
            samples
                .iter()
                .take_while(|s| same_energy(s.energy, best_energy))
                .map(|s| model.decode(&s.assignment))
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        Ok(SampleSet {
            samples,
            best_energy,
            decoded,
            truncated,
        })
    }

    /// Samples within tolerance of the best energy.
    pub fn ground_states(&self) -> impl Iterator<Item = &Sample> {
        let best = self.best_energy;
        self.samples.iter().take_while(move |s| same_energy(s.energy, best))
    }

    /// Total reads represented by the set.
    pub fn total_count(&self) -> u64 {
        self.samples.iter().map(|s| s.count).sum()
    }

    /// Number of reads whose energy matches `target`.
    pub fn occurrences_at(&self, target: f64) -> u64 {
        self.samples
            .iter()
            .filter(|s| same_energy(s.energy, target))
            .map(|s| s.count)
            .sum()
    }
}

/// Diagonal terms and symmetric neighbour lists of a model.
struct Adjacency {
    diag: Vec<f64>,
    start: Vec<usize>,
    nbr: Vec<(usize, f64)>,
}

impl Adjacency {
    fn new(model: &QuboModel) -> Self {
        let n = model.n_qubits();
        let mut diag = vec![0.0; n];
        let mut lists: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (&(i, j), &c) in model.coeffs() {
            if c == 0.0 {
                continue;
            }
            if i == j {
                diag[i] += c;
            } else {
                lists[i].push((j, c));
                lists[j].push((i, c));
            }
        }
        let mut start = Vec::with_capacity(n + 1);
        let mut nbr = Vec::new();
        start.push(0);
        for l in lists {
            nbr.extend(l);
            start.push(nbr.len());
        }
        Adjacency { diag, start, nbr }
    }

    fn n(&self) -> usize {
        self.diag.len()
    }

    fn neighbours(&self, i: usize) -> &[(usize, f64)] {
        &self.nbr[self.start[i]..self.start[i + 1]]
    }

    /// `field[i]` is the energy change of setting bit `i` from 0 to 1.
    fn fields(&self, bits: &[u8]) -> Vec<f64> {
        (0..self.n())
            .map(|i| {
                self.diag[i]
                    + self
                        .neighbours(i)
                        .iter()
                        .filter(|(j, _)| bits[*j] == 1)
                        .map(|(_, c)| c)
                        .sum::<f64>()
            })
            .collect()
    }

    fn energy(&self, bits: &[u8]) -> f64 {
        let mut e = 0.0;
        for i in 0..self.n() {
            if bits[i] == 0 {
                continue;
            }
            e += self.diag[i];
            for &(j, c) in self.neighbours(i) {
                if j > i && bits[j] == 1 {
                    e += c;
                }
            }
        }
        e
    }

    /// Flips bit `i`, updating neighbour fields; returns the energy change.
    fn flip(&self, bits: &mut [u8], fields: &mut [f64], i: usize) -> f64 {
        let (delta, sign) = if bits[i] == 0 {
            (fields[i], 1.0)
        } else {
            (-fields[i], -1.0)
        };
        bits[i] ^= 1;
        for &(j, c) in self.neighbours(i) {
            fields[j] += sign * c;
        }
        delta
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExhaustiveParams {
    pub cap: usize,
    /// Ground states recorded before the result is marked truncated.
    pub max_ground_states: usize,
}

impl Default for ExhaustiveParams {
    fn default() -> Self {
        ExhaustiveParams {
            cap: EXHAUSTIVE_CAP,
            max_ground_states: 1 << 16,
        }
    }
}

pub fn solve_exhaustive(model: &QuboModel) -> Result<SampleSet> {
    solve_exhaustive_with(model, &ExhaustiveParams::default())
}

/// Enumerates all `2^k` assignments and returns every one at the minimum
/// energy, each with count 1.
pub fn solve_exhaustive_with(model: &QuboModel, params: &ExhaustiveParams) -> Result<SampleSet> {
    let n = model.n_qubits();
    if n > params.cap {
        return Err(Error::SizeCap {
            qubits: n,
            cap: params.cap,
        });
    }
    let adj = Adjacency::new(model);
    let prefix_bits = n.min(6);
    let low = n - prefix_bits;
    let limit = params.max_ground_states;

    let chunks: Vec<(f64, Vec<Vec<u8>>, bool)> = (0..1u64 << prefix_bits)
        .into_par_iter()
        .map(|prefix| enumerate_chunk(&adj, n, low, prefix, limit))
        .collect();

    // Candidates were kept with a loose tolerance; settle them on exactly
    // recomputed energies.
    let overflow = chunks.iter().any(|c| c.2);
    let mut candidates: Vec<(f64, Vec<u8>)> = chunks
        .into_iter()
        .flat_map(|(_, states, _)| states)
        .map(|bits| (model.energy_bits(&bits), bits))
        .collect();
    let best = candidates.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    candidates.retain(|c| same_energy(c.0, best));
    candidates.sort_by(|a, b| a.1.cmp(&b.1));
    let truncated = overflow || candidates.len() > limit;
    candidates.truncate(limit);
    let counts = candidates.into_iter().map(|(_, bits)| (bits, 1)).collect();
    SampleSet::from_counts(model, counts, truncated)
}

fn enumerate_chunk(
    adj: &Adjacency,
    n: usize,
    low: usize,
    prefix: u64,
    limit: usize,
) -> (f64, Vec<Vec<u8>>, bool) {
    let mut bits = vec![0u8; n];
    for k in 0..n - low {
        bits[low + k] = ((prefix >> k) & 1) as u8;
    }
    let mut fields = adj.fields(&bits);
    let mut energy = adj.energy(&bits);
    let mut best = energy;
    let loose = |e: f64, b: f64| e <= b + 1e-6 * (1.0 + b.abs());
    let mut kept: Vec<(f64, Vec<u8>)> = vec![(energy, bits.clone())];
    let mut overflow = false;
    for step in 1..1u64 << low {
        let i = step.trailing_zeros() as usize;
        energy += adj.flip(&mut bits, &mut fields, i);
        if step & 0xfff == 0 {
            energy = adj.energy(&bits);
            fields = adj.fields(&bits);
        }
        if energy < best {
            best = energy;
            kept.retain(|(e, _)| loose(*e, best));
        }
        if loose(energy, best) {
            if kept.len() <= 2 * limit {
                kept.push((energy, bits.clone()));
            } else {
                overflow = true;
            }
        }
    }
    (best, kept.into_iter().map(|(_, b)| b).collect(), overflow)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SaParams {
    pub reads: usize,
    pub sweeps: usize,
    pub beta_start: f64,
    pub beta_end: f64,
    pub seed: u64,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            reads: 1000,
            sweeps: 200,
            beta_start: 0.1,
            beta_end: 10.0,
            seed: 0,
        }
    }
}

impl SaParams {
    pub fn validate(&self) -> Result<()> {
        if self.reads == 0 || self.sweeps == 0 {
            return Err(Error::InvalidParams("reads and sweeps must be at least 1".into()));
        }
        if !(self.beta_start > 0.0 && self.beta_start < self.beta_end && self.beta_end.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "beta schedule needs 0 < start < end, got {} -> {}",
                self.beta_start, self.beta_end
            )));
        }
        Ok(())
    }

    /// Same reads, sweeps and seed with a beta range fitted to the model:
    /// the largest single-flip change is accepted with probability 1/2 at
    /// the start, and the smallest nonzero coefficient is rejected with
    /// probability 99/100 at the end.
    pub fn fitted_to(&self, model: &QuboModel) -> SaParams {
        let adj = Adjacency::new(model);
        let mut max_delta: f64 = 0.0;
        let mut min_coeff = f64::INFINITY;
        for i in 0..adj.n() {
            let mut total = adj.diag[i].abs();
            if adj.diag[i] != 0.0 {
                min_coeff = min_coeff.min(adj.diag[i].abs());
            }
            for &(_, c) in adj.neighbours(i) {
                total += c.abs();
                min_coeff = min_coeff.min(c.abs());
            }
            max_delta = max_delta.max(total);
        }
        if max_delta == 0.0 || !min_coeff.is_finite() {
            return *self;
        }
        let beta_start = std::f64::consts::LN_2 / max_delta;
        let beta_end = (100f64.ln() / min_coeff).max(beta_start * 10.0);
        SaParams {
            beta_start,
            beta_end,
            ..*self
        }
    }

    fn beta(&self, sweep: usize) -> f64 {
        if self.sweeps == 1 {
            return self.beta_end;
        }
        let t = sweep as f64 / (self.sweeps - 1) as f64;
        self.beta_start * (self.beta_end / self.beta_start).powf(t)
    }
}

/// Independent Metropolis anneals, one random stream per read derived from
/// `(seed, read index)`, so the result does not depend on thread count.
pub fn solve_sa(model: &QuboModel, p: &SaParams) -> Result<SampleSet> {
    p.validate()?;
    let adj = Adjacency::new(model);
    let finals: Vec<Vec<u8>> = (0..p.reads)
        .into_par_iter()
        .map(|read| anneal(&adj, p, read as u64))
        .collect();
    let mut counts: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    for bits in finals {
        *counts.entry(bits).or_default() += 1;
    }
    SampleSet::from_counts(model, counts, false)
}

fn anneal(adj: &Adjacency, p: &SaParams, read: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    rng.set_stream(read);
    let n = adj.n();
    let mut bits: Vec<u8> = (0..n).map(|_| rng.gen_range(0..=1u8)).collect();
    let mut fields = adj.fields(&bits);
    for sweep in 0..p.sweeps {
        let beta = p.beta(sweep);
        for i in 0..n {
            let delta = if bits[i] == 0 { fields[i] } else { -fields[i] };
            if delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp() {
                adj.flip(&mut bits, &mut fields, i);
            }
        }
    }
    bits
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRow {
    pub trial: usize,
    pub occurrences: u64,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuccessReport {
    pub minimum: f64,
    pub reads: usize,
    pub rows: Vec<TrialRow>,
    pub average_probability: f64,
}

/// Runs `trials` annealing batches (seeds `seed`, `seed + 1`, ...) and counts
/// reads reaching the minimum. The minimum is found exhaustively unless
/// supplied.
pub fn success_report(
    model: &QuboModel,
    p: &SaParams,
    trials: usize,
    minimum: Option<f64>,
) -> Result<SuccessReport> {
    if trials == 0 {
        return Err(Error::InvalidParams("at least one trial is required".into()));
    }
    let minimum = match minimum {
        Some(m) => m,
        None => solve_exhaustive(model)?.best_energy,
    };
    let rows = (0..trials)
        .map(|trial| {
            let params = SaParams {
                seed: p.seed.wrapping_add(trial as u64),
                ..*p
            };
            let set = solve_sa(model, &params)?;
            let occurrences = set.occurrences_at(minimum);
            Ok(TrialRow {
                trial: trial + 1,
                occurrences,
                probability: occurrences as f64 / p.reads as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let average_probability = rows.iter().map(|r| r.probability).sum::<f64>() / trials as f64;
    Ok(SuccessReport {
        minimum,
        reads: p.reads,
        rows,
        average_probability,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulationKind {
    Vanilla,
    Sylvester,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CongruenceSource {
    /// Symmetric elimination of `AᵀA`.
    Symmetric,
    /// `R = R'⁻¹` from `A = QR'`; fails on singular `A`.
    Qr,
    Supplied(CongruencePair),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    Exhaustive(ExhaustiveParams),
    Sa(SaParams),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    pub formulation: FormulationKind,
    pub congruence: CongruenceSource,
    pub method: Method,
    pub build: BuildOptions,
    /// Refit the annealing beta range to every model built.
    pub fit_beta: bool,
    /// Extra rounds that solve `Aδ = b − Ax` for a correction, keeping the
    /// digit count and moving the exponent window to the residual's scale.
    pub refine_rounds: usize,
}

impl SolveOptions {
    pub fn new(formulation: FormulationKind, method: Method) -> Self {
        SolveOptions {
            formulation,
            congruence: CongruenceSource::Symmetric,
            method,
            build: BuildOptions::default(),
            fit_beta: false,
            refine_rounds: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoundReport {
    pub round: usize,
    pub lo: i32,
    pub hi: i32,
    pub best_energy: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SystemSolution {
    /// Samples of the first model, built with the caller's encoding.
    pub samples: SampleSet,
    pub model: QuboModel,
    pub x_best: Vec<f64>,
    /// `‖A·x_best − b‖₂`.
    pub residual: f64,
    pub solved: bool,
    pub rounds: Vec<RoundReport>,
}

fn pair_for(sys: &LinearSystem, source: &CongruenceSource) -> Result<CongruencePair> {
    match source {
        CongruenceSource::Symmetric => diagonalize_congruent(&sys.gram()),
        CongruenceSource::Qr => qr_congruence(sys.a()),
        CongruenceSource::Supplied(p) => Ok(p.clone()),
    }
}

fn build(sys: &LinearSystem, opts: &SolveOptions, pair: &CongruencePair, spec: &EncodingSpec) -> Result<QuboModel> {
    match opts.formulation {
        FormulationKind::Vanilla => build_vanilla_with(sys, spec, &opts.build),
        FormulationKind::Sylvester => build_sylvester_with(sys, pair, spec, &opts.build),
    }
}

fn run(model: &QuboModel, opts: &SolveOptions, round: usize) -> Result<SampleSet> {
    match &opts.method {
        Method::Exhaustive(p) => solve_exhaustive_with(model, p),
        Method::Sa(p) => {
            let mut p = SaParams {
                seed: p.seed.wrapping_add(round as u64),
                ..*p
            };
            if opts.fit_beta {
                p = p.fitted_to(model);
            }
            solve_sa(model, &p)
        }
    }
}

/// Largest possible `|x_i|` (vanilla) or `|y_i|` (Sylvester) for a solution
/// of `Ax = r`, from `Σ d_j y_j² = ‖r‖²` with `x = Ry`.
fn correction_bound(pair: &CongruencePair, formulation: FormulationKind, rnorm: f64) -> f64 {
    let n = pair.n();
    let ybound: Vec<f64> = pair
        .d
        .iter()
        .map(|&d| if d > 0.0 { rnorm / d.sqrt() } else { 0.0 })
        .collect();
    match formulation {
        FormulationKind::Sylvester => ybound.iter().copied().fold(0.0, f64::max),
        FormulationKind::Vanilla => (0..n)
            .map(|i| (0..n).map(|j| pair.r[(i, j)].abs() * ybound[j]).sum::<f64>())
            .fold(0.0, f64::max),
    }
}

/// Compiles `Ax = b`, finds a ground state, and decodes `x`.
///
/// Without refinement the system counts as solved when the best energy
/// reaches `−bᵀb` within `SOLVED_RTOL·(1 + bᵀb)`. With refinement it counts
/// as solved when the final `‖Ax − b‖²` is within the same bound.
pub fn solve_system(sys: &LinearSystem, spec: &EncodingSpec, opts: &SolveOptions) -> Result<SystemSolution> {
    let pair = match (opts.formulation, &opts.congruence) {
        (FormulationKind::Vanilla, CongruenceSource::Qr) | (FormulationKind::Vanilla, CongruenceSource::Supplied(_)) => {
            pair_for(sys, &opts.congruence)?
        }
        (FormulationKind::Vanilla, _) if opts.refine_rounds == 0 => {
            CongruencePair::new(vec![1.0; sys.n()], crate::linalg::Matrix::identity(sys.n()))?
        }
        _ => pair_for(sys, &opts.congruence)?,
    };
    let btb = sys.btb();
    let tol = SOLVED_RTOL * (1.0 + btb);

    let model = build(sys, opts, &pair, spec)?;
    let samples = run(&model, opts, 0)?;
    let first = samples
        .samples
        .first()
        .ok_or_else(|| Error::Numerical("solver returned no samples".into()))?;
    let mut x = model.decode(&first.assignment)?.x;
    let mut residual = sys.residual(&x)?;
    let mut rounds = vec![RoundReport {
        round: 0,
        lo: spec.lo,
        hi: spec.hi,
        best_energy: samples.best_energy,
        residual,
    }];
    let mut solved = samples.best_energy + btb <= tol;

    let floor = 1e-13 * (1.0 + norm2(sys.b()));
    for round in 1..=opts.refine_rounds {
        if residual <= floor {
            break;
        }
        let r = sys.residual_vector(&x)?;
        let bound = correction_bound(&pair, opts.formulation, norm2(&r));
        if !(bound > 0.0 && bound.is_finite()) {
            break;
        }
        // Solve A·δ' = r/2^hi over exponents 1-digits..=0, then δ = 2^hi·δ',
        // so coefficients stay well above the zero-drop threshold.
        let hi = bound.log2().ceil() as i32;
        let lo = hi - spec.digits() as i32 + 1;
        let scale = 2f64.powi(hi);
        if scale == 0.0 || !scale.is_finite() {
            break;
        }
        let rhs = r.iter().map(|v| rational(-v / scale)).collect::<Result<Vec<BigRational>>>()?;
        let sub = LinearSystem::from_rationals(sys.a_exact().to_vec(), rhs)?;
        let sub_spec = EncodingSpec::new(spec.kind, lo - hi, 0, spec.n_vars)?;
        let sub_model = build(&sub, opts, &pair, &sub_spec)?;
        let sub_samples = run(&sub_model, opts, round)?;
        let best = &sub_samples.samples[0];
        let delta: Vec<f64> = sub_model.decode(&best.assignment)?.x.iter().map(|d| d * scale).collect();
        let candidate: Vec<f64> = x.iter().zip(&delta).map(|(a, d)| a + d).collect();
        let cand_residual = sys.residual(&candidate)?;
        rounds.push(RoundReport {
            round,
            lo,
            hi,
            best_energy: sub_samples.best_energy * scale * scale,
            residual: cand_residual.min(residual),
        });
        if cand_residual >= residual {
            break;
        }
        x = candidate;
        residual = cand_residual;
    }
    if opts.refine_rounds > 0 {
        solved = residual * residual <= tol;
    }
    Ok(SystemSolution {
        samples,
        model,
        x_best: x,
        residual,
        solved,
        rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::EncodingSpec;

    fn tiny(coeffs: &[((usize, usize), f64)], n: usize) -> QuboModel {
        QuboModel::from_coeffs(n, coeffs.iter().copied().collect(), 0.0).unwrap()
    }

    #[test]
    fn single_positive_qubit() {
        let set = solve_exhaustive(&tiny(&[((0, 0), 5.0)], 1)).unwrap();
        assert_eq!(set.best_energy, 0.0);
        assert_eq!(set.samples.len(), 1);
        assert_eq!(set.samples[0].assignment.bits(), &[0]);
    }

    #[test]
    fn exhaustive_matches_brute_force() {
        let coeffs = [
            ((0, 0), -1.0),
            ((1, 1), -1.0),
            ((0, 1), 2.0),
            ((2, 2), 0.5),
            ((1, 2), -3.0),
            ((3, 3), -0.25),
            ((0, 3), 0.25),
        ];
        let m = tiny(&coeffs, 4);
        let set = solve_exhaustive(&m).unwrap();
        let brute = (0..16u64)
            .map(|i| m.energy(&Assignment::from_index(i, 4)).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(set.best_energy, brute);
        for s in set.ground_states() {
            assert_eq!(m.energy(&s.assignment).unwrap(), brute);
        }
    }

    #[test]
    fn ties_are_all_reported_in_order() {
        // -1 on either qubit, +2 for both: two ground states at -1.
        let m = tiny(&[((0, 0), -1.0), ((1, 1), -1.0), ((0, 1), 2.0)], 2);
        let set = solve_exhaustive(&m).unwrap();
        let bits: Vec<&[u8]> = set.samples.iter().map(|s| s.assignment.bits()).collect();
        assert_eq!(bits, vec![&[0u8, 1][..], &[1, 0][..]]);
    }

    #[test]
    fn cap_is_enforced() {
        let m = QuboModel::empty(30);
        assert!(matches!(solve_exhaustive(&m), Err(Error::SizeCap { qubits: 30, cap: 26 })));
    }

    #[test]
    fn sa_on_nonnegative_model_finds_zero() {
        let m = tiny(&[((0, 0), 1.0), ((1, 1), 2.0), ((0, 1), 1.0), ((2, 2), 0.5)], 3);
        let p = SaParams {
            reads: 50,
            ..SaParams::default()
        };
        let set = solve_sa(&m, &p).unwrap();
        assert_eq!(set.best_energy, 0.0);
        assert_eq!(set.samples[0].assignment.bits(), &[0, 0, 0]);
        assert_eq!(set.total_count(), 50);
    }

    #[test]
    fn sa_is_deterministic() {
        let m = tiny(&[((0, 0), -1.0), ((1, 1), -1.0), ((0, 1), 2.0), ((1, 2), -1.0)], 3);
        let p = SaParams {
            reads: 64,
            seed: 11,
            ..SaParams::default()
        };
        assert_eq!(solve_sa(&m, &p).unwrap(), solve_sa(&m, &p).unwrap());
    }

    #[test]
    fn bad_schedule_rejected() {
        let p = SaParams {
            beta_start: 5.0,
            beta_end: 1.0,
            ..SaParams::default()
        };
        assert!(p.validate().is_err());
        assert!(SaParams { reads: 0, ..SaParams::default() }.validate().is_err());
    }

    #[test]
    fn identity_system() {
        let sys = LinearSystem::from_rows(&[[1.0, 0.0], [0.0, 1.0]], &[1.0, 1.0]).unwrap();
        let spec = EncodingSpec::signed_pair(0, 1, 2).unwrap();
        for f in [FormulationKind::Vanilla, FormulationKind::Sylvester] {
            let opts = SolveOptions::new(f, Method::Exhaustive(ExhaustiveParams::default()));
            let sol = solve_system(&sys, &spec, &opts).unwrap();
            assert_eq!(sol.x_best, vec![1.0, 1.0]);
            assert!(sol.solved);
        }
    }

    #[test]
    fn insufficient_range_is_not_solved() {
        let sys = LinearSystem::from_rows(&[[1.0]], &[10.0]).unwrap();
        let spec = EncodingSpec::signed_pair(0, 1, 1).unwrap();
        let opts = SolveOptions::new(FormulationKind::Sylvester, Method::Exhaustive(ExhaustiveParams::default()));
        let sol = solve_system(&sys, &spec, &opts).unwrap();
        assert!(!sol.solved);
        assert_eq!(sol.x_best, vec![3.0]);
        assert_eq!(sol.residual, 7.0);
    }

    #[test]
    fn report_shape() {
        let m = tiny(&[((0, 0), -1.0)], 1);
        let p = SaParams {
            reads: 1,
            ..SaParams::default()
        };
        let rep = success_report(&m, &p, 1, None).unwrap();
        assert_eq!(rep.rows.len(), 1);
        assert!(rep.rows[0].probability == 0.0 || rep.rows[0].probability == 1.0);
    }
}
