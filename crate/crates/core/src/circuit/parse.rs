use super::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};

/// Parses the line-oriented circuit format:
///
/// ```text
/// # comment
/// qubits 3
/// h 0
/// cx 0 1
/// rz 0.0490873852 2
/// ```
///
/// The first non-comment line declares the register; every following line
/// holds one gate as `<mnemonic> [<angle>] <qubit>...`.
pub fn parse_circuit(text: &str, name: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some(c) = circuit.as_mut() else {
            circuit = Some(parse_header(&tokens, line, name)?);
            continue;
        };
        let gate = parse_gate(&tokens, line)?;
        c.push(gate).map_err(|e| Error::Parse { line, message: e.to_string() })?;
    }
    circuit.ok_or(Error::Parse { line: 0, message: "missing `qubits <n>` header".into() })
}

fn parse_header(tokens: &[&str], line: usize, name: &str) -> Result<Circuit> {
    match tokens {
        ["qubits", n] => {
            let n: usize = n.parse().map_err(|_| Error::Parse {
                line,
                message: format!("invalid qubit count `{n}`"),
            })?;
            Circuit::new(n, name).map_err(|e| Error::Parse { line, message: e.to_string() })
        }
        _ => Err(Error::Parse { line, message: "expected `qubits <n>` as the first statement".into() }),
    }
}

fn parse_gate(tokens: &[&str], line: usize) -> Result<Gate> {
    let mnemonic = tokens[0];
    let kind = GateKind::from_mnemonic(mnemonic)
        .ok_or_else(|| Error::UnknownGate { line, mnemonic: mnemonic.to_string() })?;
    let mut args = &tokens[1..];
    let angle = if kind.is_rotation() {
        let Some((first, rest)) = args.split_first() else {
            return Err(Error::Parse { line, message: format!("{mnemonic} requires an angle") });
        };
        args = rest;
        let a: f64 = first.parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid angle `{first}`"),
        })?;
        Some(a)
    } else {
        None
    };
    if args.len() != kind.arity() {
        // A stray extra number on a non-rotation gate is almost always an angle.
        let message = if !kind.is_rotation() && args.len() == kind.arity() + 1 {
            format!("{mnemonic} takes no angle")
        } else {
            format!("{mnemonic} expects {} qubit index(es), got {}", kind.arity(), args.len())
        };
        return Err(Error::Parse { line, message });
    }
    let qubits = args
        .iter()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse { line, message: format!("invalid qubit index `{t}`") })
        })
        .collect::<Result<Vec<_>>>()?;
    Gate::new(kind, &qubits, angle).map_err(|e| Error::Parse { line, message: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_transcription() {
        let c = parse_circuit("qubits 2\nh 0\ncx 0 1", "bell").unwrap();
        assert_eq!(c.n_qubits(), 2);
        assert_eq!(c.gates(), &[Gate::h(0), Gate::cx(0, 1)]);
    }

    #[test]
    fn rotation_transcription() {
        let c = parse_circuit("qubits 1\nrz 0.05 0", "r").unwrap();
        assert_eq!(c.gates(), &[Gate::rz(0.05, 0)]);
    }

    #[test]
    fn duplicate_qubit_is_error() {
        let err = parse_circuit("qubits 2\ncx 0 0", "bad").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(err.to_string().contains("duplicate"));
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header\n\n  qubits 3 # three\nh 0 # first\n\ncx 0 1\n";
        let c = parse_circuit(text, "c").unwrap();
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn error_paths_carry_line_numbers() {
        let cases = [
            ("qubits 2\nfoo 0", 2),
            ("qubits 2\nh 2", 2),
            ("qubits 2\nh 0\nrz 0", 3),
            ("qubits 2\nh 0.5 0", 2),
            ("qubits 2\ncx 0", 2),
            ("qubits 2\nrx abc 0", 2),
            ("h 0", 1),
            ("qubits x", 1),
        ];
        for (text, line) in cases {
            match parse_circuit(text, "c") {
                Err(Error::Parse { line: l, .. }) | Err(Error::UnknownGate { line: l, .. }) => {
                    assert_eq!(l, line, "{text:?}")
                }
                other => panic!("{text:?} gave {other:?}"),
            }
        }
        assert!(parse_circuit("# only a comment\n", "c").is_err());
    }

    #[test]
    fn text_round_trip() {
        let c = Circuit::from_gates(
            3,
            "rt",
            [Gate::h(0), Gate::rz(0.0490873852, 2), Gate::swap(2, 1), Gate::ry(-1e-7, 1)],
        )
        .unwrap();
        assert_eq!(parse_circuit(&c.to_text(), "rt").unwrap(), c);
    }
}
