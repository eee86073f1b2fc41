//! Line-oriented circuit files.
//!
//! ```text
//! # Bell pair
//! wires 2
//! input 0 zero
//! gate H 0
//! gate CNOT 0 1
//! gate T 1 switch=off
//! ```
//!
//! `wires` must come first. Wires without an `input` line start in `zero`.
//! Input names: zero, one, plus, minus, plus_i, minus_i, mixed. A `switch=`
//! suffix marks the gate as switchable.

use qvn_core::circuit::{GateKind, GateRecord, InputState, Switch, TailedCircuit, MAX_WIRES};

use crate::error::{QvnError, Result};

fn err(ctx: &str, line: usize, message: impl Into<String>) -> QvnError {
    QvnError::Parse { context: ctx.into(), line, message: message.into() }
}

fn parse_wire(ctx: &str, line: usize, tok: &str, n: usize) -> Result<usize> {
    let w: usize = tok.parse().map_err(|_| err(ctx, line, format!("invalid wire `{tok}`")))?;
    if w >= n {
        return Err(err(ctx, line, format!("wire {w} out of range for {n} wires")));
    }
    Ok(w)
}

/// Parse circuit text. `ctx` names the source in diagnostics.
pub fn parse_circuit(text: &str, ctx: &str) -> Result<TailedCircuit> {
    let mut n_wires: Option<usize> = None;
    let mut inputs: Vec<Option<InputState>> = Vec::new();
    let mut gates = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        match toks[0] {
            "wires" => {
                if n_wires.is_some() {
                    return Err(err(ctx, line, "duplicate `wires` line"));
                }
                let [_, count] = toks[..] else {
                    return Err(err(ctx, line, "expected `wires <count>`"));
                };
                let n: usize = count.parse().map_err(|_| err(ctx, line, format!("invalid wire count `{count}`")))?;
                if n == 0 || n > MAX_WIRES {
                    return Err(err(ctx, line, format!("wire count must lie in 1..={MAX_WIRES}")));
                }
                n_wires = Some(n);
                inputs = vec![None; n];
            }
            "input" => {
                let n = n_wires.ok_or_else(|| err(ctx, line, "`input` before `wires`"))?;
                let [_, wire, state] = toks[..] else {
                    return Err(err(ctx, line, "expected `input <wire> <state>`"));
                };
                let w = parse_wire(ctx, line, wire, n)?;
                let s: InputState = state.parse().map_err(|_| err(ctx, line, format!("unknown input state `{state}`")))?;
                if inputs[w].replace(s).is_some() {
                    return Err(err(ctx, line, format!("duplicate input for wire {w}")));
                }
            }
            "gate" => {
                let n = n_wires.ok_or_else(|| err(ctx, line, "`gate` before `wires`"))?;
                if toks.len() < 2 {
                    return Err(err(ctx, line, "expected `gate <H|T|CNOT> <wires...>`"));
                }
                let kind: GateKind = toks[1].parse().map_err(|_| err(ctx, line, format!("unknown gate `{}`", toks[1])))?;
                let mut rest = &toks[2..];
                let mut switch = None;
                if let Some(last) = rest.last() {
                    if let Some(v) = last.strip_prefix("switch=") {
                        let s: Switch = v.parse().map_err(|_| err(ctx, line, format!("invalid switch `{v}`")))?;
                        switch = Some(s);
                        rest = &rest[..rest.len() - 1];
                    }
                }
                if rest.len() != kind.arity() {
                    return Err(err(ctx, line, format!("{kind} takes {} wire(s), got {}", kind.arity(), rest.len())));
                }
                let wires = rest.iter().map(|t| parse_wire(ctx, line, t, n)).collect::<Result<Vec<_>>>()?;
                if wires.len() == 2 && wires[0] == wires[1] {
                    return Err(err(ctx, line, "CNOT control and target must differ"));
                }
                gates.push(match switch {
                    Some(s) => GateRecord::switched(kind, wires, s),
                    None => GateRecord::new(kind, wires),
                });
            }
            other => return Err(err(ctx, line, format!("unknown directive `{other}`"))),
        }
    }
    let n = n_wires.ok_or_else(|| err(ctx, text.lines().count().max(1), "missing `wires` line"))?;
    let inputs = inputs.into_iter().map(|s| s.unwrap_or(InputState::Zero)).collect();
    TailedCircuit::new(n, gates, inputs).map_err(|e| QvnError::core(ctx, e))
}

/// Render a circuit in the file format accepted by [`parse_circuit`].
pub fn write_circuit(c: &TailedCircuit) -> String {
    let mut out = format!("wires {}\n", c.n_wires());
    for (w, s) in c.inputs().iter().enumerate() {
        out.push_str(&format!("input {w} {}\n", s.name()));
    }
    for g in c.gates() {
        out.push_str(&format!("gate {}", g.kind));
        for w in &g.wires {
            out.push_str(&format!(" {w}"));
        }
        if g.switchable {
            out.push_str(if g.is_active() { " switch=on" } else { " switch=off" });
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parses_bell_pair() {
        let c = parse_circuit("# demo\nwires 2\ninput 1 plus  # trailing\ngate H 0\ngate CNOT 0 1\n", "t").unwrap();
        assert_eq!(c.n_wires(), 2);
        assert_eq!(c.inputs(), &[InputState::Zero, InputState::Plus]);
        assert_eq!(c.gates().len(), 2);
    }

    #[test]
    fn switch_suffix() {
        let c = parse_circuit("wires 1\ngate T 0 switch=off\n", "t").unwrap();
        assert!(c.gates()[0].switchable);
        assert!(!c.gates()[0].is_active());
    }

    #[test]
    fn errors_name_the_line() {
        let cases = [
            ("wires 2\ngate Q 0\n", 2),
            ("gate H 0\n", 1),
            ("wires 2\ngate CNOT 0\n", 2),
            ("wires 2\n\ngate H 7\n", 3),
            ("wires 2\ninput 0 sideways\n", 2),
            ("wires 2\nwires 3\n", 2),
            ("wires 99\n", 1),
            ("wires 2\ngate CNOT 1 1\n", 2),
        ];
        for (text, line) in cases {
            match parse_circuit(text, "c.txt") {
                Err(QvnError::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        let msg = parse_circuit("wires 2\ngate Q 0\n", "c.txt").unwrap_err().to_string();
        assert!(msg.starts_with("c.txt:2:"), "{msg}");
    }

    #[test]
    fn round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let c = TailedCircuit::random(3, 6, &mut rng).unwrap();
            assert_eq!(parse_circuit(&write_circuit(&c), "t").unwrap(), c);
        }
    }
}
