//! Pauli-frame Monte Carlo of Shor, Steane and homomorphic measurement.
//!
//! All circuits are CNOTs and Z-basis measurements on CSS states, so X and Z
//! errors are tracked as two independent bit vectors. Noise is
//! phenomenological: i.i.d. flips on the data before the interaction,
//! residual flips on the freshly prepared ancilla, and readout flips.

pub mod matching;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::csscode::CssCode;
use crate::f2la::{BitMatrix, BitVec, F2Error};
use crate::gadget::{measured_group, shor_gadget, CatShape, GadgetError, HomGadget};
pub use matching::{DecodeError, DecoderKind, Decoding, DecodingGraph};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("probability {name} = {value} is outside [0, 1]")]
    Probability { name: &'static str, value: f64 },
    #[error("gadget measures no logical operator")]
    NothingMeasured,
    #[error("majority vote needs an odd number of rounds, got {0}")]
    EvenRounds(usize),
    #[error("frame sizes ({data}, {ancilla}) do not match Γ of shape {gamma:?}")]
    FrameSize {
        data: usize,
        ancilla: usize,
        gamma: (usize, usize),
    },
    #[error("{which} decoder unavailable: {source}")]
    Decoder { which: &'static str, source: DecodeError },
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error(transparent)]
    Linear(#[from] F2Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliFrame {
    pub x: BitVec,
    pub z: BitVec,
}

impl PauliFrame {
    pub fn new(n: usize) -> Self {
        Self {
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn xor(&self, other: &PauliFrame) -> PauliFrame {
        PauliFrame {
            x: self.x.xor(&other.x),
            z: self.z.xor(&other.z),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// X and Z flip probability per data qubit, before the interaction.
    pub p_data: f64,
    /// X and Z flip probability per ancilla qubit after preparation.
    pub p_anc_residual: f64,
    /// Flip probability per measured ancilla bit.
    pub p_meas: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn uniform(p: f64, seed: u64) -> Self {
        Self {
            p_data: p,
            p_anc_residual: p,
            p_meas: p,
            seed,
        }
    }

    pub fn noiseless() -> Self {
        Self::uniform(0.0, 0)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for (name, value) in [
            ("p_data", self.p_data),
            ("p_anc_residual", self.p_anc_residual),
            ("p_meas", self.p_meas),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(SimError::Probability { name, value });
            }
        }
        Ok(())
    }

    fn is_zero(&self) -> bool {
        self.p_data == 0.0 && self.p_anc_residual == 0.0 && self.p_meas == 0.0
    }
}

/// CNOTs from data qubit `i` to ancilla qubit `j` wherever `Γ_ij = 1`.
///
/// X errors copy forward (`anc.x ⊕= Γᵀ data.x`), Z errors copy back
/// (`data.z ⊕= Γ anc.z`).
pub fn apply_interaction(
    gamma: &BitMatrix,
    data: &PauliFrame,
    anc: &PauliFrame,
) -> Result<(PauliFrame, PauliFrame), SimError> {
    if data.len() != gamma.rows() || anc.len() != gamma.cols() {
        return Err(SimError::FrameSize {
            data: data.len(),
            ancilla: anc.len(),
            gamma: gamma.shape(),
        });
    }
    let data_out = PauliFrame {
        x: data.x.clone(),
        z: data.z.xor(&gamma.mul_vec(&anc.z)?),
    };
    let anc_out = PauliFrame {
        x: anc.x.xor(&gamma.left_mul_vec(&data.x)?),
        z: anc.z.clone(),
    };
    Ok((data_out, anc_out))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeasurementResult {
    /// One bit per measured-group generator.
    pub logical_outcomes: BitVec,
    /// Outcomes of the ancilla Z-checks, computed from the readout string.
    pub check_syndrome: BitVec,
    /// Data frame after the interaction.
    pub data_frame: PauliFrame,
}

fn sample(rng: &mut ChaCha8Rng, n: usize, p: f64) -> BitVec {
    if p == 0.0 {
        return BitVec::zeros(n);
    }
    BitVec::from_support(n, (0..n).filter(|_| rng.gen_bool(p)))
}

fn frame(rng: &mut ChaCha8Rng, n: usize, p: f64) -> PauliFrame {
    let x = sample(rng, n, p);
    let z = sample(rng, n, p);
    PauliFrame { x, z }
}

/// Per-trial generator: one ChaCha stream per trial index.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Read-only state shared by all trials of one gadget.
pub struct Simulator<'a> {
    gadget: &'a HomGadget,
    kind: DecoderKind,
    /// Ancilla operators `v_j ∈ ker H_X′`.
    ancilla_reps: Vec<BitVec>,
    /// Data operators `Γ v_j`.
    measured: Vec<BitVec>,
    x_stabilizers: BitMatrix,
    readout: Result<DecodingGraph, DecodeError>,
    data_x: Result<DecodingGraph, DecodeError>,
    data_z: Result<DecodingGraph, DecodeError>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Tally {
    trials: u64,
    readout_errors: u64,
    data_errors: u64,
    decoder_failures: u64,
    fallbacks: u64,
}

impl std::ops::Add for Tally {
    type Output = Tally;
    fn add(self, o: Tally) -> Tally {
        Tally {
            trials: self.trials + o.trials,
            readout_errors: self.readout_errors + o.readout_errors,
            data_errors: self.data_errors + o.data_errors,
            decoder_failures: self.decoder_failures + o.decoder_failures,
            fallbacks: self.fallbacks + o.fallbacks,
        }
    }
}

impl<'a> Simulator<'a> {
    pub fn new(gadget: &'a HomGadget, kind: DecoderKind) -> Self {
        let mg = measured_group(gadget);
        Self {
            gadget,
            kind,
            measured: mg.basis.row_vecs(),
            ancilla_reps: mg.ancilla_reps,
            x_stabilizers: gadget.ancilla.h_x().rowspace_basis(),
            readout: DecodingGraph::new(gadget.ancilla.h_z()),
            data_x: DecodingGraph::new(gadget.data.h_z()),
            data_z: DecodingGraph::new(gadget.data.h_x()),
        }
    }

    pub fn gadget(&self) -> &HomGadget {
        self.gadget
    }

    /// Data operators read out, one per outcome bit.
    pub fn measured_operators(&self) -> &[BitVec] {
        &self.measured
    }

    fn graph<'g>(
        which: &'static str,
        g: &'g Result<DecodingGraph, DecodeError>,
    ) -> Result<&'g DecodingGraph, SimError> {
        g.as_ref().map_err(|e| SimError::Decoder {
            which,
            source: e.clone(),
        })
    }

    /// Fails early if a decoder the noise model needs cannot be built.
    pub fn check_decoders(&self, noise: &NoiseModel) -> Result<(), SimError> {
        if noise.is_zero() {
            return Ok(());
        }
        Self::graph("ancilla readout", &self.readout)?;
        if noise.p_data > 0.0 {
            Self::graph("data X", &self.data_x)?;
        }
        if noise.p_data > 0.0 || noise.p_anc_residual > 0.0 {
            Self::graph("data Z", &self.data_z)?;
        }
        Ok(())
    }

    /// Decodes a given readout string: `codeword ⊕ anc.x ⊕ flips`.
    pub fn readout_string(
        &self,
        anc: &PauliFrame,
        codeword: &BitVec,
        flips: &BitVec,
    ) -> Result<(BitVec, BitVec, bool), SimError> {
        let raw = codeword.xor(&anc.x).xor(flips);
        let syndrome = self.gadget.ancilla.h_z().mul_vec(&raw)?;
        let (corrected, fell_back) = if syndrome.is_zero() {
            (raw, false)
        } else {
            let graph = Self::graph("ancilla readout", &self.readout)?;
            let Decoding { correction, fell_back } =
                graph.decode(&syndrome, self.kind).map_err(|source| SimError::Decoder {
                    which: "ancilla readout",
                    source,
                })?;
            (raw.xor(&correction), fell_back)
        };
        let outcomes = BitVec::from_bools(&self.ancilla_reps.iter().map(|v| corrected.dot(v)).collect::<Vec<_>>());
        Ok((outcomes, syndrome, fell_back))
    }

    /// Measures the ancilla in the Z basis: samples a uniformly random
    /// X-stabilizer codeword and readout flips, then decodes.
    pub fn readout_ancilla(
        &self,
        anc: &PauliFrame,
        p_meas: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<(BitVec, BitVec, bool), SimError> {
        let m = self.gadget.ancilla.n();
        let mut codeword = BitVec::zeros(m);
        for r in 0..self.x_stabilizers.rows() {
            if rng.gen::<bool>() {
                codeword.xor_assign(&self.x_stabilizers.row(r));
            }
        }
        let flips = sample(rng, m, p_meas);
        self.readout_string(anc, &codeword, &flips)
    }

    /// Interaction followed by readout.
    pub fn measure(
        &self,
        data: &PauliFrame,
        anc: &PauliFrame,
        p_meas: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<MeasurementResult, SimError> {
        let (data_frame, anc) = apply_interaction(&self.gadget.gamma, data, anc)?;
        let (logical_outcomes, check_syndrome, _) = self.readout_ancilla(&anc, p_meas, rng)?;
        Ok(MeasurementResult {
            logical_outcomes,
            check_syndrome,
            data_frame,
        })
    }

    /// The values a perfect readout would report: the data X error after
    /// ideal correction by the data decoder, paired with each `Γ v_j`.
    fn ground_truth(&self, data_x: &BitVec) -> Result<BitVec, SimError> {
        let residual = if data_x.is_zero() {
            data_x.clone()
        } else {
            let graph = Self::graph("data X", &self.data_x)?;
            let syn = self.gadget.data.h_z().mul_vec(data_x)?;
            let corr = graph.decode(&syn, self.kind).map_err(|source| SimError::Decoder {
                which: "data X",
                source,
            })?;
            data_x.xor(&corr.correction)
        };
        Ok(BitVec::from_bools(
            &self.measured.iter().map(|op| residual.dot(op)).collect::<Vec<_>>(),
        ))
    }

    fn data_corrupted(&self, data_z: &BitVec) -> Result<bool, SimError> {
        if data_z.is_zero() {
            return Ok(false);
        }
        let graph = Self::graph("data Z", &self.data_z)?;
        let syn = self.gadget.data.h_x().mul_vec(data_z)?;
        let corr = graph.decode(&syn, self.kind).map_err(|source| SimError::Decoder {
            which: "data Z",
            source,
        })?;
        let residual = data_z.xor(&corr.correction);
        Ok(self
            .gadget
            .data
            .z_logical_coords(&residual)
            .is_none_or(|c| !c.is_zero()))
    }

    fn trial(&self, noise: &NoiseModel, index: u64) -> Tally {
        let mut rng = trial_rng(noise.seed, index);
        let (n, m) = self.gadget.gamma.shape();
        let data = frame(&mut rng, n, noise.p_data);
        let anc = frame(&mut rng, m, noise.p_anc_residual);
        let mut t = Tally {
            trials: 1,
            ..Tally::default()
        };
        let outcome = apply_interaction(&self.gadget.gamma, &data, &anc).and_then(|(data_after, anc_after)| {
            let (outcomes, _, fell_back) = self.readout_ancilla(&anc_after, noise.p_meas, &mut rng)?;
            let truth = self.ground_truth(&data.x)?;
            let corrupted = self.data_corrupted(&data_after.z)?;
            Ok((outcomes != truth, corrupted, fell_back))
        });
        match outcome {
            Ok((wrong, corrupted, fell_back)) => {
                t.readout_errors = wrong as u64;
                t.data_errors = corrupted as u64;
                t.fallbacks = fell_back as u64;
            }
            Err(_) => {
                t.readout_errors = 1;
                t.decoder_failures = 1;
            }
        }
        t
    }
}

/// Wilson score interval at 95%.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054_f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub trials: u64,
    /// Trials where some reported logical bit differs from the truth.
    pub readout_errors: u64,
    /// Trials where the data block ends with a Z-logical error.
    pub data_errors: u64,
    /// Trials where a decoder could not pair the defects (counted as
    /// readout errors too).
    pub decoder_failures: u64,
    /// Trials where exact matching fell back to union-find.
    pub fallbacks: u64,
    pub seed: u64,
}

impl RunStats {
    pub fn readout_rate(&self) -> f64 {
        rate(self.readout_errors, self.trials)
    }

    pub fn data_rate(&self) -> f64 {
        rate(self.data_errors, self.trials)
    }

    pub fn readout_interval(&self) -> (f64, f64) {
        wilson_interval(self.readout_errors, self.trials)
    }

    pub fn data_interval(&self) -> (f64, f64) {
        wilson_interval(self.data_errors, self.trials)
    }
}

fn rate(k: u64, n: u64) -> f64 {
    if n == 0 {
        0.0
    } else {
        k as f64 / n as f64
    }
}

/// Prepare the ancilla, interact, measure and decode, `trials` times.
pub fn run_homomorphic(
    gadget: &HomGadget,
    noise: &NoiseModel,
    trials: u64,
    kind: DecoderKind,
) -> Result<RunStats, SimError> {
    noise.validate()?;
    let sim = Simulator::new(gadget, kind);
    if sim.measured.is_empty() {
        return Err(SimError::NothingMeasured);
    }
    sim.check_decoders(noise)?;
    let t = (0..trials)
        .into_par_iter()
        .map(|i| sim.trial(noise, i))
        .reduce(Tally::default, |a, b| a + b);
    Ok(RunStats {
        trials: t.trials,
        readout_errors: t.readout_errors,
        data_errors: t.data_errors,
        decoder_failures: t.decoder_failures,
        fallbacks: t.fallbacks,
        seed: noise.seed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShorStats {
    pub trials: u64,
    pub correct: u64,
    pub weight: usize,
    pub rounds: usize,
    pub p: f64,
    pub seed: u64,
}

impl ShorStats {
    pub fn accuracy(&self) -> f64 {
        rate(self.correct, self.trials)
    }

    /// `1/2 + (1/2)(1 − 2p)^w`: a single round with per-bit readout flips.
    pub fn single_round_prediction(&self) -> f64 {
        shor_single_round_accuracy(self.p, self.weight)
    }

    pub fn interval(&self) -> (f64, f64) {
        wilson_interval(self.correct, self.trials)
    }
}

/// Accuracy of one cat-state readout of a weight-`w` operator when each
/// measured bit flips with probability `p`.
pub fn shor_single_round_accuracy(p: f64, w: usize) -> f64 {
    0.5 + 0.5 * (1.0 - 2.0 * p).powi(w as i32)
}

/// Repeated cat-state measurement of a Z-type operator with majority vote.
///
/// Each round uses an ideal cat state and perfect data (as if refreshed by
/// error correction between rounds); only readout bits flip.
pub fn run_shor_repeated(
    code: &CssCode,
    support: &BitVec,
    p: f64,
    rounds: usize,
    trials: u64,
    seed: u64,
) -> Result<ShorStats, SimError> {
    if rounds.is_multiple_of(2) {
        return Err(SimError::EvenRounds(rounds));
    }
    NoiseModel {
        p_data: 0.0,
        p_anc_residual: 0.0,
        p_meas: p,
        seed,
    }
    .validate()?;
    let gadget = shor_gadget(code, support, CatShape::Circle)?;
    let sim = Simulator::new(&gadget, DecoderKind::Exact);
    let w = gadget.ancilla.n();
    let anc = PauliFrame::new(w);
    // An operator in rs(H_Z) has a fixed +1 outcome; so does the logical
    // in the prepared +1 eigenstate.
    let correct: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let mut ones = 0usize;
            for _ in 0..rounds {
                match sim.readout_ancilla(&anc, p, &mut rng) {
                    Ok((bits, _, _)) => ones += bits.get(0) as usize,
                    Err(_) => return 0,
                }
            }
            u64::from(2 * ones < rounds)
        })
        .sum();
    Ok(ShorStats {
        trials,
        correct,
        weight: w,
        rounds,
        p,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cell2::{build_torus, css_of_complex, torus_row_loop, TorusLoop};
    use crate::cover::{build_covering_ancilla, PeriodicComplex, WidthPolicy};
    use crate::gadget::{from_cellmap, steane_gadget};
    use proptest::prelude::*;

    fn fig2(d: usize) -> HomGadget {
        let t = PeriodicComplex::torus(d).unwrap();
        let out = build_covering_ancilla(&t, &TorusLoop::Z1.walk(d), WidthPolicy::Auto).unwrap();
        from_cellmap(out.map).unwrap()
    }

    fn bits(n: usize, raw: &[usize]) -> BitVec {
        BitVec::from_support(n, raw.iter().map(|&i| i % n).collect::<std::collections::BTreeSet<_>>())
    }

    #[test]
    fn zero_frames_stay_zero() {
        let g = fig2(3);
        let (d, a) = apply_interaction(&g.gamma, &PauliFrame::new(18), &PauliFrame::new(15)).unwrap();
        assert_eq!(d, PauliFrame::new(18));
        assert_eq!(a, PauliFrame::new(15));
        assert!(apply_interaction(&g.gamma, &PauliFrame::new(17), &PauliFrame::new(15)).is_err());
    }

    #[test]
    fn single_errors_follow_gamma() {
        let g = fig2(3);
        for e in 0..18 {
            let mut data = PauliFrame::new(18);
            data.x.flip(e);
            let (_, a) = apply_interaction(&g.gamma, &data, &PauliFrame::new(15)).unwrap();
            assert_eq!(a.x, g.gamma.row(e));
        }
        for q in 0..15 {
            let mut anc = PauliFrame::new(15);
            anc.z.flip(q);
            let (d, _) = apply_interaction(&g.gamma, &PauliFrame::new(18), &anc).unwrap();
            assert_eq!(d.z, g.gamma.column(q));
            assert!(d.z.weight() <= 1);
        }
    }

    proptest! {
        #[test]
        fn interaction_is_linear(
            a in proptest::collection::vec(0usize..64, 0..10),
            b in proptest::collection::vec(0usize..64, 0..10),
            c in proptest::collection::vec(0usize..64, 0..10),
            e in proptest::collection::vec(0usize..64, 0..10),
        ) {
            let g = fig2(3);
            let f1 = PauliFrame { x: bits(18, &a), z: bits(18, &b) };
            let g1 = PauliFrame { x: bits(15, &c), z: bits(15, &e) };
            let f2 = PauliFrame { x: bits(18, &e), z: bits(18, &c) };
            let g2 = PauliFrame { x: bits(15, &b), z: bits(15, &a) };
            let (d1, a1) = apply_interaction(&g.gamma, &f1, &g1).unwrap();
            let (d2, a2) = apply_interaction(&g.gamma, &f2, &g2).unwrap();
            let (d, an) = apply_interaction(&g.gamma, &f1.xor(&f2), &g1.xor(&g2)).unwrap();
            prop_assert_eq!(d, d1.xor(&d2));
            prop_assert_eq!(an, a1.xor(&a2));
        }

        #[test]
        fn codeword_does_not_change_outcomes(mask in any::<u64>(), errs in proptest::collection::vec(0usize..64, 0..4)) {
            let g = fig2(3);
            let sim = Simulator::new(&g, DecoderKind::Exact);
            let hx = g.ancilla.h_x();
            let mut cw = BitVec::zeros(15);
            for r in 0..hx.rows() {
                if mask >> (r % 64) & 1 == 1 {
                    cw.xor_assign(&hx.row(r));
                }
            }
            let anc = PauliFrame { x: bits(15, &errs), z: BitVec::zeros(15) };
            let zero = BitVec::zeros(15);
            let (o1, s1, _) = sim.readout_string(&anc, &zero, &zero).unwrap();
            let (o2, s2, _) = sim.readout_string(&anc, &cw, &zero).unwrap();
            prop_assert_eq!(o1, o2);
            prop_assert_eq!(s1, s2);
        }
    }

    #[test]
    fn zero_noise_zero_errors() {
        for g in [
            fig2(3),
            steane_gadget(&css_of_complex(&build_torus(3).unwrap())).unwrap(),
        ] {
            let s = run_homomorphic(&g, &NoiseModel::noiseless(), 500, DecoderKind::Exact).unwrap();
            assert_eq!((s.trials, s.readout_errors, s.data_errors), (500, 0, 0));
        }
    }

    #[test]
    fn single_ancilla_error_is_corrected() {
        let g = fig2(3);
        let sim = Simulator::new(&g, DecoderKind::Exact);
        let zero = BitVec::zeros(15);
        for q in 0..15 {
            let mut anc = PauliFrame::new(15);
            anc.x.flip(q);
            let (o, _, _) = sim.readout_string(&anc, &zero, &zero).unwrap();
            assert!(o.is_zero(), "qubit {q}");
        }
    }

    #[test]
    fn half_distance_pattern_beats_the_decoder() {
        let g = fig2(3);
        let sim = Simulator::new(&g, DecoderKind::Exact);
        let v = &sim.ancilla_reps[0];
        let hz = g.ancilla.h_z();
        let m = g.ancilla.n();
        // Weight-3 ancilla X-logical by brute force.
        let mut logical = None;
        'outer: for a in 0..m {
            for b in a + 1..m {
                for c in b + 1..m {
                    let x = BitVec::from_support(m, [a, b, c]);
                    if hz.mul_vec(&x).unwrap().is_zero() && x.dot(v) {
                        logical = Some([a, b, c]);
                        break 'outer;
                    }
                }
            }
        }
        let [a, b, c] = logical.expect("ancilla has X-distance 3");
        let zero = BitVec::zeros(m);
        let flipped = [[a, b], [a, c], [b, c]].iter().any(|pair| {
            let anc = PauliFrame {
                x: BitVec::from_support(m, *pair),
                z: zero.clone(),
            };
            sim.readout_string(&anc, &zero, &zero).unwrap().0.get(0)
        });
        assert!(flipped);
    }

    #[test]
    fn seeded_runs_repeat() {
        let g = fig2(3);
        let noise = NoiseModel::uniform(0.05, 11);
        let a = run_homomorphic(&g, &noise, 2000, DecoderKind::Exact).unwrap();
        let b = run_homomorphic(&g, &noise, 2000, DecoderKind::Exact).unwrap();
        assert_eq!(a, b);
        assert!(a.readout_errors > 0);
        let other = run_homomorphic(&g, &NoiseModel { seed: 12, ..noise }, 2000, DecoderKind::Exact).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn readout_reproduces_syndrome() {
        let g = fig2(3);
        let sim = Simulator::new(&g, DecoderKind::UnionFind);
        let mut rng = trial_rng(5, 0);
        let anc = PauliFrame {
            x: BitVec::from_support(15, [1, 7]),
            z: BitVec::zeros(15),
        };
        let (_, syn, _) = sim.readout_ancilla(&anc, 0.0, &mut rng).unwrap();
        assert_eq!(syn, g.ancilla.h_z().mul_vec(&anc.x).unwrap());
    }

    #[test]
    fn shor_rounds() {
        let code = css_of_complex(&build_torus(3).unwrap());
        let z1 = torus_row_loop(3, 0).edge_vector(18);
        assert_eq!(
            run_shor_repeated(&code, &z1, 0.1, 2, 10, 0),
            Err(SimError::EvenRounds(2))
        );
        let perfect = run_shor_repeated(&code, &z1, 0.0, 5, 100, 0).unwrap();
        assert_eq!(perfect.correct, 100);
        let one = run_shor_repeated(&code, &z1, 0.1, 1, 20_000, 1).unwrap();
        let se = (one.single_round_prediction() * (1.0 - one.single_round_prediction()) / 20_000.0).sqrt();
        assert!((one.accuracy() - one.single_round_prediction()).abs() < 4.0 * se);
        let five = run_shor_repeated(&code, &z1, 0.1, 5, 20_000, 1).unwrap();
        assert!(five.accuracy() > one.accuracy());
    }

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson_interval(30, 1000);
        assert!(lo < 0.03 && 0.03 < hi);
        assert!(wilson_interval(0, 100).0 < 1e-12);
    }
}
