//! Static profile-legality check of a network.

use std::fmt;

use super::network::{Network, NeuronId};
use super::profile::HardwareProfile;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    InDegree { neuron: NeuronId, degree: usize, limit: usize },
    OutDegree { neuron: NeuronId, degree: usize, limit: usize },
    /// Outside the signed `S_pr`-bit range `[-2^(S_pr-1), 2^(S_pr-1) - 1]`.
    Weight { synapse: usize, weight: i64, bound: i64 },
    Delay { synapse: usize, delay: u32, limit: u32 },
    /// Outside the signed `N_pr`-bit range.
    Threshold { neuron: NeuronId, value: i64, bound: i64 },
    Bias { neuron: NeuronId, value: i64, bound: i64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::InDegree { neuron, degree, limit } => {
                write!(f, "neuron {neuron}: in-degree {degree} > F_in {limit}")
            }
            Violation::OutDegree { neuron, degree, limit } => {
                write!(f, "neuron {neuron}: out-degree {degree} > F_out {limit}")
            }
            Violation::Weight { synapse, weight, bound } => {
                write!(f, "synapse {synapse}: weight {weight} outside signed range of bound {bound}")
            }
            Violation::Delay { synapse, delay, limit } => {
                write!(f, "synapse {synapse}: delay {delay} > M_delay {limit}")
            }
            Violation::Threshold { neuron, value, bound } => {
                write!(f, "neuron {neuron}: threshold {value} outside signed range of bound {bound}")
            }
            Violation::Bias { neuron, value, bound } => {
                write!(f, "neuron {neuron}: bias {value} outside signed range of bound {bound}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter()
    }

    pub fn in_degree(&self) -> impl Iterator<Item = &Violation> {
        self.iter()
            .filter(|v| matches!(v, Violation::InDegree { .. }))
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "profile-legal");
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

/// `-bound <= v < bound`, the two's-complement range for `bound = 2^(bits-1)`.
fn signed_fits(v: i64, bound: i64) -> bool {
    v >= -bound && v < bound
}

pub fn validate(net: &Network, profile: &HardwareProfile) -> ViolationReport {
    let mut violations = Vec::new();
    let nb = profile.current_bound();
    let wb = profile.weight_bound();
    for (i, (din, dout)) in net.in_degrees().into_iter().zip(net.out_degrees()).enumerate() {
        let neuron = NeuronId(i as u32);
        if din > profile.f_in {
            violations.push(Violation::InDegree {
                neuron,
                degree: din,
                limit: profile.f_in,
            });
        }
        if dout > profile.f_out {
            violations.push(Violation::OutDegree {
                neuron,
                degree: dout,
                limit: profile.f_out,
            });
        }
        let spec = &net.neurons[i];
        if !signed_fits(spec.threshold, nb) {
            violations.push(Violation::Threshold {
                neuron,
                value: spec.threshold,
                bound: nb,
            });
        }
        if !signed_fits(spec.bias, nb) {
            violations.push(Violation::Bias {
                neuron,
                value: spec.bias,
                bound: nb,
            });
        }
    }
    for (i, s) in net.synapses.iter().enumerate() {
        if !signed_fits(s.weight, wb) {
            violations.push(Violation::Weight {
                synapse: i,
                weight: s.weight,
                bound: wb,
            });
        }
        if s.delay > profile.m_delay {
            violations.push(Violation::Delay {
                synapse: i,
                delay: s.delay,
                limit: profile.m_delay,
            });
        }
    }
    ViolationReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snn::network::NeuronSpec;

    #[test]
    fn two_input_and_is_legal_at_fan_in_two() {
        let mut net = Network::new();
        let a = net.add_input();
        let b = net.add_input();
        let and = net.add_neuron(NeuronSpec::gate(1));
        net.connect(a, and, 0, 1);
        net.connect(b, and, 0, 1);
        let p = HardwareProfile::new(5, 5, 1, 2, 2).unwrap();
        assert!(validate(&net, &p).is_empty());
    }

    #[test]
    fn weight_at_signed_boundary_is_flagged() {
        let p = HardwareProfile::new(8, 8, 1, 4, 4).unwrap();
        let mut net = Network::new();
        let a = net.add_input();
        let s = net.add_neuron(NeuronSpec::gate(63));
        net.connect(a, s, 0, 127);
        net.connect(s, s, 0, -128);
        assert!(validate(&net, &p).is_empty());
        net.connect(a, s, 0, 128);
        net.connect(s, s, 0, -129);
        let weights: Vec<i64> = validate(&net, &p)
            .iter()
            .map(|v| match v {
                Violation::Weight { weight, bound: 128, .. } => *weight,
                other => panic!("unexpected {other}"),
            })
            .collect();
        assert_eq!(weights, vec![128, -129]);
    }

    #[test]
    fn degree_delay_and_threshold_limits() {
        let p = HardwareProfile::new(6, 6, 2, 2, 2).unwrap();
        let mut net = Network::new();
        let a = net.add_input();
        let g = net.add_neuron(NeuronSpec::gate(32).with_bias(-33));
        for _ in 0..3 {
            net.connect(a, g, 3, 1);
        }
        let r = validate(&net, &p);
        assert_eq!(r.in_degree().count(), 1);
        assert!(r.iter().any(|v| matches!(v, Violation::OutDegree { degree: 3, .. })));
        assert_eq!(r.iter().filter(|v| matches!(v, Violation::Delay { .. })).count(), 3);
        assert!(r.iter().any(|v| matches!(v, Violation::Threshold { value: 32, .. })));
        assert!(r.iter().any(|v| matches!(v, Violation::Bias { value: -33, .. })));
    }
}
