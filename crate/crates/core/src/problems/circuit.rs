use super::sat::Cnf3;
use super::{Budget, ClassTag, InstanceStream, Language, Meter};
use crate::base::{encode_unary, index_width, BinStr, Parameterization, PolyNat};
use crate::error::{Error, Result};

pub const MAX_CIRCUIT_INPUTS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    Input,
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
}

impl Gate {
    fn opcode(self) -> u64 {
        match self {
            Gate::Input => 0,
            Gate::Not(_) => 1,
            Gate::And(..) => 2,
            Gate::Or(..) => 3,
        }
    }
}

/// Boolean circuit in topological order; the last gate is the output.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(gates: Vec<Gate>) -> Self {
        Circuit { gates }
    }

    pub fn num_inputs(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::Input)).count()
    }

    pub fn check(&self) -> Result<()> {
        if self.num_inputs() == 0 {
            return Err(Error::malformed("circuit: no input gate"));
        }
        for (t, g) in self.gates.iter().enumerate() {
            let ok = match *g {
                Gate::Input => true,
                Gate::Not(i) => i < t,
                Gate::And(i, j) | Gate::Or(i, j) => i <= j && j < t,
            };
            if !ok {
                return Err(Error::malformed(format!("circuit: gate {t} is not canonical")));
            }
        }
        Ok(())
    }

    pub fn encode(&self) -> BinStr {
        let g = self.gates.len();
        let w = index_width(g);
        let mut out = BinStr::new();
        out.push_ones(g);
        out.push(false);
        for gate in &self.gates {
            out.push_fixed(gate.opcode(), 2);
            match *gate {
                Gate::Input => {}
                Gate::Not(i) => out.push_fixed(i as u64, w),
                Gate::And(i, j) | Gate::Or(i, j) => {
                    out.push_fixed(i as u64, w);
                    out.push_fixed(j as u64, w);
                }
            }
        }
        out
    }

    pub fn decode(x: &BinStr) -> Result<Circuit> {
        let mut r = x.reader();
        let g = r
            .read_unary()
            .ok_or_else(|| Error::malformed("circuit: missing gate header"))?;
        let w = index_width(g);
        let short = || Error::malformed("circuit: truncated gate list");
        let mut gates = Vec::with_capacity(g);
        for _ in 0..g {
            let op = r.read_fixed(2).ok_or_else(short)?;
            let gate = match op {
                0 => Gate::Input,
                1 => Gate::Not(r.read_fixed(w).ok_or_else(short)? as usize),
                _ => {
                    let i = r.read_fixed(w).ok_or_else(short)? as usize;
                    let j = r.read_fixed(w).ok_or_else(short)? as usize;
                    if op == 2 {
                        Gate::And(i, j)
                    } else {
                        Gate::Or(i, j)
                    }
                }
            };
            gates.push(gate);
        }
        if !r.is_done() {
            return Err(Error::malformed("circuit: trailing bits"));
        }
        let c = Circuit::new(gates);
        c.check()?;
        Ok(c)
    }

    /// Output value with input gates taking successive bits of `inputs`.
    pub fn eval(&self, inputs: u64) -> bool {
        let mut val: Vec<bool> = Vec::with_capacity(self.gates.len());
        let mut next_input = 0;
        for g in &self.gates {
            let v = match *g {
                Gate::Input => {
                    next_input += 1;
                    inputs >> (next_input - 1) & 1 == 1
                }
                Gate::Not(i) => !val[i],
                Gate::And(i, j) => val[i] && val[j],
                Gate::Or(i, j) => val[i] || val[j],
            };
            val.push(v);
        }
        *val.last().unwrap()
    }
}

/// Upper bound on the encoding length of a circuit with `g` gates.
pub fn max_encoded_len(g: usize) -> usize {
    g + 1 + g * (2 + 2 * index_width(g))
}

/// CIRCUIT-SAT.
#[derive(Debug, Clone, Copy, Default)]
pub struct CircuitSat;

impl Language for CircuitSat {
    fn id(&self) -> &str {
        "circuitsat"
    }

    fn class_tag(&self) -> ClassTag {
        ClassTag::NP
    }

    fn validate(&self, x: &BinStr) -> bool {
        Circuit::decode(x).is_ok()
    }

    fn decide_metered(&self, x: &BinStr, meter: &mut Meter) -> Result<bool> {
        let c = Circuit::decode(x)?;
        let nu = c.num_inputs();
        if nu > MAX_CIRCUIT_INPUTS {
            return Err(Error::scale(format!(
                "{nu} inputs exceed the cap of {MAX_CIRCUIT_INPUTS}"
            )));
        }
        for a in 0..1u64 << nu {
            meter.tick(c.gates.len() as u64)?;
            if c.eval(a) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn enumerate(&self, budget: &Budget) -> Result<InstanceStream<'_>> {
        if budget.max_size > 6 {
            return Err(Error::scale("circuit enumeration beyond 6 gates"));
        }
        Ok(Box::new(
            budget
                .sizes()
                .filter(|&g| g >= 1)
                .flat_map(|g| GateSequences::new(g).map(|c| c.encode())),
        ))
    }
}

/// Odometer over all canonical gate sequences of a fixed length.
struct GateSequences {
    digits: Vec<usize>,
    done: bool,
}

impl GateSequences {
    fn new(g: usize) -> Self {
        GateSequences {
            digits: vec![0; g],
            done: false,
        }
    }

    // choices at position t: input, t negations, t(t+1)/2 ands, t(t+1)/2 ors
    fn choices(t: usize) -> usize {
        1 + t + t * (t + 1)
    }

    fn gate(t: usize, d: usize) -> Gate {
        if d == 0 {
            return Gate::Input;
        }
        if d <= t {
            return Gate::Not(d - 1);
        }
        let rest = d - 1 - t;
        let half = t * (t + 1) / 2;
        let (is_or, mut idx) = (rest >= half, rest % half);
        let mut i = 0;
        while idx >= t - i {
            idx -= t - i;
            i += 1;
        }
        let j = i + idx;
        if is_or {
            Gate::Or(i, j)
        } else {
            Gate::And(i, j)
        }
    }
}

impl Iterator for GateSequences {
    type Item = Circuit;

    fn next(&mut self) -> Option<Circuit> {
        if self.done {
            return None;
        }
        let c = Circuit::new(
            self.digits
                .iter()
                .enumerate()
                .map(|(t, &d)| Self::gate(t, d))
                .collect(),
        );
        let mut t = self.digits.len();
        loop {
            if t == 0 {
                self.done = true;
                break;
            }
            t -= 1;
            self.digits[t] += 1;
            if self.digits[t] < Self::choices(t) {
                break;
            }
            self.digits[t] = 0;
        }
        Some(c)
    }
}

/// `(μ+ν)(C)`: non-input plus input gates, in unary.
pub fn munu() -> Parameterization {
    Parameterization::new("munu", PolyNat::identity(), |x| {
        Ok(encode_unary(Circuit::decode(x)?.gates.len()))
    })
}

/// AND-of-ORs circuit equivalent to a 3CNF formula.
pub fn circuit_from_cnf(f: &Cnf3) -> Circuit {
    let n = f.num_vars;
    if n == 0 {
        // the empty formula is true: x ∨ ¬x
        return Circuit::new(vec![Gate::Input, Gate::Not(0), Gate::Or(0, 1)]);
    }
    let mut gates: Vec<Gate> = (0..n).map(|_| Gate::Input).collect();
    gates.extend((0..n).map(Gate::Not));
    let lit_gate = |v: u32, neg: bool| if neg { n + v as usize - 1 } else { v as usize - 1 };
    let ordered = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut conj: Option<usize> = None;
    for c in &f.clauses {
        let (a, b) = ordered(lit_gate(c[0].var, c[0].neg), lit_gate(c[1].var, c[1].neg));
        gates.push(Gate::Or(a, b));
        let (a, b) = ordered(gates.len() - 1, lit_gate(c[2].var, c[2].neg));
        gates.push(Gate::Or(a, b));
        let clause = gates.len() - 1;
        conj = Some(match conj {
            None => clause,
            Some(prev) => {
                gates.push(Gate::And(prev, clause));
                gates.len() - 1
            }
        });
    }
    Circuit::new(gates)
}

#[cfg(test)]
mod tests {
    use super::super::sat::enumerate_formulas;
    use super::super::ThreeSat;
    use super::*;

    #[test]
    fn enumeration_count_is_factorial_squared() {
        // position t offers (t+1)^2 gates
        let want: u64 = (1..=5u64).map(|g| (1..=g).product::<u64>().pow(2)).sum();
        assert_eq!(want, 15_017);
        assert_eq!(CircuitSat.enumerate(&Budget::upto(5)).unwrap().count() as u64, want);
    }

    #[test]
    fn enumeration_valid_distinct_round_trip() {
        let all: Vec<_> = CircuitSat.enumerate(&Budget::upto(4)).unwrap().collect();
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), all.len());
        for x in &all {
            assert_eq!(&Circuit::decode(x).unwrap().encode(), x);
            assert!(x.len() <= max_encoded_len(Circuit::decode(x).unwrap().gates.len()));
        }
    }

    #[test]
    fn small_circuits() {
        let contradiction = Circuit::new(vec![Gate::Input, Gate::Not(0), Gate::And(0, 1)]);
        assert!(!CircuitSat.decide(&contradiction.encode()).unwrap());
        let xor_like = Circuit::new(vec![Gate::Input, Gate::Input, Gate::Not(0), Gate::And(1, 2)]);
        assert!(CircuitSat.decide(&xor_like.encode()).unwrap());
        assert_eq!(munu().apply(&xor_like.encode()).unwrap().len(), 4);
        let bad = Circuit::new(vec![Gate::Not(0)]);
        assert!(!CircuitSat.validate(&bad.encode()));
        let unsorted = Circuit::new(vec![Gate::Input, Gate::Input, Gate::And(1, 0)]);
        assert!(!CircuitSat.validate(&unsorted.encode()));
    }

    #[test]
    fn cross_oracle_with_3sat() {
        for f in enumerate_formulas(&Budget::upto(3).with_clauses(2)).unwrap() {
            let c = circuit_from_cnf(&f);
            c.check().unwrap();
            assert_eq!(
                CircuitSat.decide(&c.encode()).unwrap(),
                ThreeSat.decide(&f.encode()).unwrap()
            );
        }
    }
}
