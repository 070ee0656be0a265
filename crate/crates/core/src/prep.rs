//! Heralded preparation of a target ancilla from the uniform KLM state.
//!
//! The circuit attenuates the uniform state with 2*floor(n/2) beam
//! splitters whose idle ports feed photon detectors; accepting only the
//! all-detectors-vacuum branch leaves the target coefficients. Component j
//! picks up the telescoping product of the transmissions on its path,
//! c(j)/c(floor(n/2)), so the heralded branch is proportional to the
//! target and succeeds with probability 1/((n+1) c(floor(n/2))^2).

use crate::ancilla::AncillaCoefficients;
use crate::error::{Error, Result};
use crate::focksim::{
    apply_mode_unitary, beam_splitter_matrix, measure_photon_numbers, FockAmplitudeMap,
    ModeOccupation,
};
use crate::report::format_sig16;
use num_complex::Complex64;
use serde::Serialize;

/// Beam-splitter layout for one target: the mirrored transmission list
/// t_i = c(m-i)/c(m+1-i), i = 1..=m, m = floor(n/2), applied to both
/// ancilla halves.
#[derive(Debug, Clone)]
pub struct PrepCircuit {
    n: usize,
    target: AncillaCoefficients,
    transmissions: Vec<f64>,
}

impl PrepCircuit {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn target(&self) -> &AncillaCoefficients {
        &self.target
    }

    /// t_1..t_m, ordered from the center outward.
    pub fn transmissions(&self) -> &[f64] {
        &self.transmissions
    }

    pub fn beam_splitter_count(&self) -> usize {
        2 * self.transmissions.len()
    }

    pub fn to_json(&self) -> String {
        let ts: Vec<String> = self.transmissions.iter().map(|t| format_sig16(*t)).collect();
        format!(
            "{{\"n\":{},\"target\":\"{}\",\"transmissions\":[{}],\"herald_success_probability\":{}}}",
            self.n,
            self.target.label().as_str(),
            ts.join(","),
            format_sig16(herald_success_probability(self))
        )
    }
}

/// Derive the transmission list for a target.
///
/// The target must be strictly positive, symmetric (c(j) = c(n-j) within
/// 1e-10), and non-decreasing toward the center; any coefficient ratio
/// above 1 + 1e-12 would demand an unphysical transmission and is
/// rejected.
pub fn design_circuit(target: &AncillaCoefficients) -> Result<PrepCircuit> {
    let n = target.n();
    let c = target.coefficients();
    for (j, &value) in c.iter().enumerate() {
        if value <= 0.0 {
            return Err(Error::UnrealizableTarget(format!(
                "coefficient c({j}) = {value} is not strictly positive"
            )));
        }
    }
    for j in 0..=n {
        if (c[j] - c[n - j]).abs() > 1e-10 {
            return Err(Error::UnrealizableTarget(format!(
                "coefficients not symmetric: c({j}) = {} vs c({}) = {}",
                c[j],
                n - j,
                c[n - j]
            )));
        }
    }
    let m = n / 2;
    let mut transmissions = Vec::with_capacity(m);
    for i in 1..=m {
        let ratio = c[m - i] / c[m + 1 - i];
        if ratio > 1.0 + 1e-12 {
            return Err(Error::UnrealizableTarget(format!(
                "transmission t_{i} = c({})/c({}) = {ratio} exceeds 1",
                m - i,
                m + 1 - i
            )));
        }
        transmissions.push(ratio.min(1.0));
    }
    Ok(PrepCircuit {
        n,
        target: target.clone(),
        transmissions,
    })
}

/// Closed-form herald probability 1/((n+1) c(floor(n/2))^2); at least
/// 1/(n+1) since the center coefficient is at most 1.
pub fn herald_success_probability(circuit: &PrepCircuit) -> f64 {
    let m = circuit.n / 2;
    let center = circuit.target.coefficients()[m];
    1.0 / ((circuit.n + 1) as f64 * center * center)
}

/// Amplitude-level simulation of the heralded branch.
///
/// Starting from the uniform coefficients, component j keeps the product
/// of the transmissions its photons traverse; the product telescopes to
/// c(j)/c(m). Returns the branch weight and the renormalized output, after
/// checking both against the closed forms.
pub fn simulate_heralded_prep(circuit: &PrepCircuit) -> Result<(f64, AncillaCoefficients)> {
    let n = circuit.n;
    let m = n / 2;
    // prefix[q] = t_1 t_2 ... t_q
    let mut prefix = vec![1.0; m + 1];
    for (i, t) in circuit.transmissions.iter().enumerate() {
        prefix[i + 1] = prefix[i] * t;
    }

    let uniform_amp = 1.0 / ((n + 1) as f64).sqrt();
    let amplitudes: Vec<f64> = (0..=n)
        .map(|j| {
            let distance = m - j.min(n - j).min(m);
            uniform_amp * prefix[distance]
        })
        .collect();
    let success: f64 = amplitudes.iter().map(|a| a * a).sum();

    let closed_form = herald_success_probability(circuit);
    let diff = (success - closed_form).abs();
    if diff > 1e-12 {
        return Err(Error::PrepProbabilityMismatch {
            simulated: success,
            closed_form,
            diff,
        });
    }

    let norm = success.sqrt();
    let output: Vec<f64> = amplitudes.iter().map(|a| a / norm).collect();
    let target = circuit.target.coefficients();
    for j in 0..=n {
        if (output[j] - target[j]).abs() > 1e-10 {
            return Err(Error::PrepMismatch(format!(
                "output component {j} = {} differs from target {} by more than 1e-10",
                output[j], target[j]
            )));
        }
    }
    Ok((
        success,
        AncillaCoefficients::from_normalized(output, circuit.target.label()),
    ))
}

/// Fock-level verification record for the heralded branch.
#[derive(Debug, Clone, Serialize)]
pub struct PrepFockReport {
    pub success_probability: f64,
    /// Heralded per-component amplitudes, renormalized.
    pub amplitudes: Vec<f64>,
    /// Largest disagreement with the amplitude-level simulation.
    pub max_deviation: f64,
}

/// Run the preparation inside the Fock-space engine.
///
/// Builds the 2n-mode uniform KLM state (component j: first-half photons
/// in modes 0..j, second-half photons in modes n+j..2n-1), attaches each
/// beam splitter to a fresh vacuum detector mode, post-selects every
/// detector on vacuum, and checks the heralded state and probability
/// against `simulate_heralded_prep` to 1e-10.
pub fn full_fock_prep_check(circuit: &PrepCircuit) -> Result<PrepFockReport> {
    let n = circuit.n;
    let m = n / 2;
    let ts = &circuit.transmissions;

    // Uniform KLM state over modes 0..2n-1.
    let mut state = FockAmplitudeMap::new(2 * n);
    let uniform_amp = Complex64::new(1.0 / ((n + 1) as f64).sqrt(), 0.0);
    for j in 0..=n {
        state.add_term(ModeOccupation(component_pattern(n, j)), uniform_amp);
    }

    // Beam splitters: first half at modes (n - m) + i - 1 and second half
    // at modes n + m - i, both carrying t_i. The first-half placement
    // skips the center pair when n is odd.
    let mut splitters: Vec<(usize, f64)> = Vec::with_capacity(2 * m);
    for (idx, &t) in ts.iter().enumerate() {
        let i = idx + 1;
        splitters.push(((n - m) + i - 1, t));
        splitters.push((n + m - i, t));
    }

    let mut detector_modes = Vec::with_capacity(splitters.len());
    for (anc_mode, t) in splitters {
        state = push_vacuum_mode(&state);
        let det_mode = state.mode_count() - 1;
        detector_modes.push(det_mode);
        state = apply_mode_unitary(&state, &[anc_mode, det_mode], &beam_splitter_matrix(t))?;
    }

    let (probability, conditional) = if detector_modes.is_empty() {
        (1.0, state)
    } else {
        let outcomes = measure_photon_numbers(&state, &detector_modes)?;
        let vacuum = ModeOccupation(vec![0u8; detector_modes.len()]);
        let heralded = outcomes
            .iter()
            .find(|(o, _)| o.measured == vacuum)
            .ok_or_else(|| {
                Error::PrepMismatch("no all-detectors-vacuum branch survived".into())
            })?;
        (heralded.1.probability, heralded.1.conditional.clone())
    };

    // Extract per-component amplitudes from the heralded state.
    let mut amplitudes = vec![0.0; n + 1];
    for (occ, &amp) in conditional.terms() {
        let j = (0..=n)
            .find(|&j| occ.0 == component_pattern(n, j))
            .ok_or_else(|| {
                Error::PrepMismatch(format!(
                    "heralded term {:?} (amplitude {amp}) is not a KLM component",
                    occ
                ))
            })?;
        if amp.im.abs() > 1e-12 {
            return Err(Error::PrepMismatch(format!(
                "heralded component {j} has a complex amplitude {amp}"
            )));
        }
        amplitudes[j] = amp.re;
    }

    let (expected_prob, expected_state) = simulate_heralded_prep(circuit)?;
    let mut max_deviation = (probability - expected_prob).abs();
    for (j, &a) in amplitudes.iter().enumerate() {
        max_deviation = max_deviation.max((a - expected_state.coefficients()[j]).abs());
    }
    if max_deviation > 1e-10 {
        return Err(Error::PrepMismatch(format!(
            "Fock-level and amplitude-level preparations disagree by {max_deviation:e}"
        )));
    }
    Ok(PrepFockReport {
        success_probability: probability,
        amplitudes,
        max_deviation,
    })
}

/// Occupations of KLM component j over 2n modes: first-half photons fill
/// modes 0..j, second-half photons fill modes n+j..2n-1.
fn component_pattern(n: usize, j: usize) -> Vec<u8> {
    let mut occ = vec![0u8; 2 * n];
    for (f, slot) in occ.iter_mut().take(n).enumerate() {
        *slot = u8::from(f < j);
    }
    for s in 0..n {
        occ[n + s] = u8::from(s >= j);
    }
    occ
}

fn push_vacuum_mode(state: &FockAmplitudeMap) -> FockAmplitudeMap {
    let mut out = FockAmplitudeMap::new(state.mode_count() + 1);
    for (occ, &amp) in state.terms() {
        let mut extended = occ.0.clone();
        extended.push(0);
        out.add_term(ModeOccupation(extended), amp);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ancilla::{custom, optimal_u, plus_optimal_v, uniform_klm};

    #[test]
    fn design_v_n2() {
        let circuit = design_circuit(&plus_optimal_v(2).unwrap()).unwrap();
        assert_eq!(circuit.beam_splitter_count(), 2);
        assert_eq!(circuit.transmissions().len(), 1);
        assert!((circuit.transmissions()[0] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn design_uniform_is_identity() {
        for n in [2usize, 3, 7] {
            let circuit = design_circuit(&uniform_klm(n).unwrap()).unwrap();
            for t in circuit.transmissions() {
                assert!((t - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn design_u_n2() {
        let circuit = design_circuit(&optimal_u(2, None).unwrap()).unwrap();
        let expected = 1.0 / (1.0 + 3.0_f64.sqrt());
        assert!((circuit.transmissions()[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn design_rejects_bad_targets() {
        // Center-dipped: would need transmission 2.
        let dipped = custom(&[2.0, 1.0, 2.0]).unwrap();
        assert!(design_circuit(&dipped).is_err());

        let asymmetric = custom(&[1.0, 2.0, 3.0]).unwrap();
        assert!(design_circuit(&asymmetric).is_err());

        let signed = custom(&[1.0, -2.0, 1.0]).unwrap();
        assert!(design_circuit(&signed).is_err());
    }

    #[test]
    fn herald_probability_examples() {
        let v2 = design_circuit(&plus_optimal_v(2).unwrap()).unwrap();
        assert!((herald_success_probability(&v2) - 0.5).abs() < 1e-14);

        for n in [1usize, 4, 9] {
            let id = design_circuit(&uniform_klm(n).unwrap()).unwrap();
            assert!((herald_success_probability(&id) - 1.0).abs() < 1e-13);
        }

        // Even n makes the center coefficient hit the sine peak exactly,
        // so the herald probability is exactly 1/2; odd n approaches it.
        let v50 = design_circuit(&plus_optimal_v(50).unwrap()).unwrap();
        assert!((herald_success_probability(&v50) - 0.5).abs() < 1e-12);
        let v51 = design_circuit(&plus_optimal_v(51).unwrap()).unwrap();
        let p51 = herald_success_probability(&v51);
        assert!(p51 < 0.5 && p51 > 0.49, "{p51}");
    }

    #[test]
    fn herald_bound_holds_up_to_200() {
        for n in 1..=200usize {
            for target in [optimal_u(n, None).unwrap(), plus_optimal_v(n).unwrap()] {
                let circuit = design_circuit(&target).unwrap();
                let p = herald_success_probability(&circuit);
                assert!(
                    p >= 1.0 / (n + 1) as f64 - 1e-14,
                    "n={n} label={:?}: {p}",
                    target.label()
                );
            }
        }
    }

    #[test]
    fn simulate_v_n2() {
        let circuit = design_circuit(&plus_optimal_v(2).unwrap()).unwrap();
        let (p, out) = simulate_heralded_prep(&circuit).unwrap();
        assert!((p - 0.5).abs() < 1e-14);
        let s6 = 6.0_f64.sqrt();
        for (a, b) in out.coefficients().iter().zip([1.0 / s6, 2.0 / s6, 1.0 / s6]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn simulate_uniform_passes_through() {
        let circuit = design_circuit(&uniform_klm(5).unwrap()).unwrap();
        let (p, out) = simulate_heralded_prep(&circuit).unwrap();
        assert!((p - 1.0).abs() < 1e-13);
        assert_eq!(out.coefficients(), uniform_klm(5).unwrap().coefficients());
    }

    #[test]
    fn simulate_matches_target_families_up_to_200() {
        for n in [1usize, 2, 3, 10, 51, 200] {
            for target in [optimal_u(n, None).unwrap(), plus_optimal_v(n).unwrap()] {
                let circuit = design_circuit(&target).unwrap();
                let (p, out) = simulate_heralded_prep(&circuit).unwrap();
                assert!(p >= 1.0 / (n + 1) as f64 - 1e-14);
                for (a, b) in out.coefficients().iter().zip(target.coefficients()) {
                    assert!((a - b).abs() <= 1e-10, "n={n}");
                }
            }
        }
    }

    #[test]
    fn center_peak_weight_approaches_two() {
        // (n+1) v(floor(n/2))^2 climbs toward 2, so the herald probability
        // for v targets tends to 1/2.
        let mut prev_defect = f64::MAX;
        for n in [10usize, 50, 100, 200] {
            let v = plus_optimal_v(n).unwrap();
            let center = v.coefficients()[n / 2];
            let weight = (n + 1) as f64 * center * center;
            let defect = (2.0 - weight).abs();
            assert!(defect <= prev_defect + 1e-12, "n={n}: defect {defect}");
            assert!(weight <= 2.0 + 1e-12);
            prev_defect = defect;
        }
        assert!(prev_defect < 1e-3);
    }

    #[test]
    fn fock_check_v_n2() {
        let circuit = design_circuit(&plus_optimal_v(2).unwrap()).unwrap();
        let report = full_fock_prep_check(&circuit).unwrap();
        assert!((report.success_probability - 0.5).abs() < 1e-12);
        assert!(report.max_deviation <= 1e-10);
    }

    #[test]
    fn fock_check_uniform_n3() {
        let circuit = design_circuit(&uniform_klm(3).unwrap()).unwrap();
        let report = full_fock_prep_check(&circuit).unwrap();
        assert!((report.success_probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fock_check_u_n2_closed_form_probability() {
        let circuit = design_circuit(&optimal_u(2, None).unwrap()).unwrap();
        let report = full_fock_prep_check(&circuit).unwrap();
        let r3 = 3.0_f64.sqrt();
        let expected = (6.0 + 2.0 * r3) / (3.0 * (4.0 + 2.0 * r3));
        assert!(
            (report.success_probability - expected).abs() < 1e-12,
            "{} vs {expected}",
            report.success_probability
        );
    }

    #[test]
    fn fock_check_matches_amplitude_level_up_to_4() {
        for n in 1..=4usize {
            for target in [optimal_u(n, None).unwrap(), plus_optimal_v(n).unwrap()] {
                let circuit = design_circuit(&target).unwrap();
                let report = full_fock_prep_check(&circuit).unwrap();
                assert!(report.max_deviation <= 1e-10, "n={n}");
            }
        }
    }

    #[test]
    fn beam_splitter_preserves_norm() {
        let mut state = FockAmplitudeMap::new(2);
        state.add_term(
            ModeOccupation(vec![1, 0]),
            Complex64::new(0.6, 0.0),
        );
        state.add_term(
            ModeOccupation(vec![1, 1]),
            Complex64::new(0.0, 0.8),
        );
        let out = apply_mode_unitary(&state, &[0, 1], &beam_splitter_matrix(0.37)).unwrap();
        assert!((out.norm_sqr() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn circuit_serializes_to_json() {
        let circuit = design_circuit(&plus_optimal_v(2).unwrap()).unwrap();
        let value: serde_json::Value = serde_json::from_str(&circuit.to_json()).unwrap();
        assert_eq!(value["n"], 2);
        assert_eq!(value["target"], "plus_optimal_v");
        assert!((value["herald_success_probability"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    }
}
