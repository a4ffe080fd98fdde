use serde::{Deserialize, Serialize};

use crate::{CttmError, Result};

/// Membrane potential (mV) at or above which a neuron spikes.
pub const SPIKE_THRESHOLD: f64 = 30.0;

/// Membrane potential every neuron is reset to before a sample is simulated.
pub const REST_POTENTIAL: f64 = -70.0;

/// Izhikevich simple-model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeuronParams {
    /// Recovery time scale (1/ms).
    pub a: f64,
    /// Recovery sensitivity to the membrane potential.
    pub b: f64,
    /// After-spike reset potential (mV).
    pub c: f64,
    /// After-spike recovery increment.
    pub d: f64,
}

impl NeuronParams {
    /// Regular spiking, used for excitatory neurons.
    pub const RS: NeuronParams = NeuronParams {
        a: 0.02,
        b: 0.2,
        c: -65.0,
        d: 8.0,
    };

    /// Low-threshold spiking, used for inhibitory neurons.
    pub const LTS: NeuronParams = NeuronParams {
        a: 0.02,
        b: 0.25,
        c: -65.0,
        d: 2.0,
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuronState {
    /// Membrane potential (mV).
    pub v: f64,
    /// Membrane recovery variable.
    pub u: f64,
}

impl NeuronState {
    /// The per-sample initial state `(-70, b * -70)`.
    pub fn rest(params: &NeuronParams) -> Self {
        NeuronState {
            v: REST_POTENTIAL,
            u: params.b * REST_POTENTIAL,
        }
    }
}

#[inline(always)]
fn dv(v: f64, u: f64, i_in: f64) -> f64 {
    // v * v first: keeps (-70, -14) an exact fixed point of the RS model.
    0.04 * (v * v) + 5.0 * v + 140.0 - u + i_in
}

/// Advance one millisecond: two 0.5 ms Euler half-steps for `v`, then one
/// 1 ms step for `u`. On a spike `v <- c`, `u <- u + d` and the recovery
/// step is skipped for that millisecond.
#[inline(always)]
pub(crate) fn advance(v: &mut f64, u: &mut f64, p: &NeuronParams, i_in: f64) -> bool {
    let mut vn = *v;
    vn += 0.5 * dv(vn, *u, i_in);
    vn += 0.5 * dv(vn, *u, i_in);
    if vn >= SPIKE_THRESHOLD {
        *v = p.c;
        *u += p.d;
        true
    } else {
        *u += p.a * (p.b * vn - *u);
        *v = vn;
        false
    }
}

/// One millisecond of neuron dynamics under input current `i_in`.
///
/// Returns the new state and whether the neuron fired during the step.
pub fn neuron_step(
    state: NeuronState,
    params: &NeuronParams,
    i_in: f64,
) -> Result<(NeuronState, bool)> {
    let all_finite = [state.v, state.u, i_in, params.a, params.b, params.c, params.d]
        .iter()
        .all(|x| x.is_finite());
    if !all_finite {
        return Err(CttmError::NumericDomain(format!(
            "non-finite neuron input: state={state:?} params={params:?} i_in={i_in}"
        )));
    }
    let (mut v, mut u) = (state.v, state.u);
    let fired = advance(&mut v, &mut u, params, i_in);
    if !v.is_finite() || !u.is_finite() {
        return Err(CttmError::NumericDomain(format!(
            "neuron state diverged from {state:?} with i_in={i_in}"
        )));
    }
    Ok((NeuronState { v, u }, fired))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spike_branch_resets() {
        let s = NeuronState { v: 31.0, u: -13.0 };
        let (next, fired) = neuron_step(s, &NeuronParams::RS, 5.0).unwrap();
        assert!(fired);
        assert_eq!(next, NeuronState { v: -65.0, u: -5.0 });
    }

    #[test]
    fn rs_rest_is_fixed_point() {
        let s = NeuronState { v: -70.0, u: -14.0 };
        let (next, fired) = neuron_step(s, &NeuronParams::RS, 0.0).unwrap();
        assert!(!fired);
        assert_eq!(next, s);
        assert_eq!(NeuronState::rest(&NeuronParams::RS), s);
    }

    #[test]
    fn rs_fires_under_dc_drive() {
        let mut s = NeuronState::rest(&NeuronParams::RS);
        let mut spikes = 0;
        for _ in 0..250 {
            let (n, f) = neuron_step(s, &NeuronParams::RS, 10.0).unwrap();
            s = n;
            spikes += f as usize;
            assert!(s.v < SPIKE_THRESHOLD);
        }
        assert!(spikes >= 1);
    }

    #[test]
    fn rejects_non_finite() {
        let s = NeuronState { v: f64::NAN, u: 0.0 };
        assert!(matches!(
            neuron_step(s, &NeuronParams::RS, 0.0),
            Err(CttmError::NumericDomain(_))
        ));
        let s = NeuronState::rest(&NeuronParams::RS);
        assert!(neuron_step(s, &NeuronParams::RS, f64::INFINITY).is_err());
    }

    #[test]
    fn presets() {
        assert_eq!(
            (NeuronParams::RS.a, NeuronParams::RS.b, NeuronParams::RS.c, NeuronParams::RS.d),
            (0.02, 0.2, -65.0, 8.0)
        );
        assert_eq!(
            (NeuronParams::LTS.a, NeuronParams::LTS.b, NeuronParams::LTS.c, NeuronParams::LTS.d),
            (0.02, 0.25, -65.0, 2.0)
        );
    }
}
