//! On-disk circuit format.
//!
//! ```json
//! {"n_qubits": 2, "gates": [{"kind": "h", "q": 0}, {"kind": "cx", "c": 0, "t": 1}]}
//! ```
//!
//! An optional `registers` object maps register names to qubit lists.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Circuit, Gate};

// Gates stay raw on input so errors can name the offending element.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    n_qubits: usize,
    gates: Vec<serde_json::Value>,
    #[serde(default)]
    registers: BTreeMap<String, Vec<usize>>,
}

#[derive(Serialize)]
struct Document<'a> {
    n_qubits: usize,
    gates: &'a [Gate],
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    registers: &'a BTreeMap<String, Vec<usize>>,
}

pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let doc: RawDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut circuit = Circuit::new(doc.n_qubits).map_err(|e| Error::Parse(e.to_string()))?;
    for (i, value) in doc.gates.into_iter().enumerate() {
        let kind = value.get("kind").and_then(|k| k.as_str()).unwrap_or("?").to_string();
        let gate: Gate = serde_json::from_value(value)
            .map_err(|e| Error::Parse(format!("gate {i} ({kind}): {e}")))?;
        gate.validate(circuit.n_qubits())
            .map_err(|e| Error::Parse(format!("gate {i} ({kind}): {e}")))?;
        circuit.gates.push(gate);
    }
    for (name, qubits) in doc.registers {
        circuit
            .set_register(&name, qubits)
            .map_err(|e| Error::Parse(e.to_string()))?;
    }
    Ok(circuit)
}

pub fn serialize_circuit(circuit: &Circuit) -> String {
    let doc = Document {
        n_qubits: circuit.n_qubits(),
        gates: circuit.gates(),
        registers: circuit.registers(),
    };
    serde_json::to_string(&doc).expect("circuit serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{addition_circuit, grover_circuit};

    #[test]
    fn parses_bell_pair() {
        let c = parse_circuit(r#"{"n_qubits":2,"gates":[{"kind":"h","q":0},{"kind":"cx","c":0,"t":1}]}"#)
            .unwrap();
        assert_eq!(c.n_qubits(), 2);
        assert_eq!(c.gates(), &[Gate::H { q: 0 }, Gate::Cx { c: 0, t: 1 }]);
    }

    #[test]
    fn serializes_canonical_form() {
        let mut c = Circuit::new(2).unwrap();
        c.push(Gate::H { q: 0 }).unwrap().push(Gate::Cx { c: 0, t: 1 }).unwrap();
        assert_eq!(
            serialize_circuit(&c),
            r#"{"n_qubits":2,"gates":[{"kind":"h","q":0},{"kind":"cx","c":0,"t":1}]}"#
        );
        let mut z = Circuit::new(3).unwrap();
        z.push(Gate::ZeroOracle { qubits: vec![0, 2] }).unwrap();
        assert!(serialize_circuit(&z).contains(r#"{"kind":"zero_oracle","qubits":[0,2]}"#));
    }

    #[test]
    fn rejects_bad_documents() {
        let err = parse_circuit(r#"{"n_qubits":1,"gates":[{"kind":"h","q":5}]}"#).unwrap_err();
        assert!(matches!(err, Error::Parse(ref m) if m.contains("gate 0")), "{err}");
        let err = parse_circuit(r#"{"n_qubits":1,"gates":[{"kind":"rz","q":0}]}"#).unwrap_err();
        assert!(matches!(err, Error::Parse(ref m) if m.contains("gate 0 (rz)")), "{err}");
        let err = parse_circuit("{\"n_qubits\":1,\n\"gates\":[").unwrap_err();
        assert!(matches!(err, Error::Parse(ref m) if m.contains("line 2")), "{err}");
        assert!(parse_circuit(r#"{"n_qubits":1,"gates":[{"kind":"h","q":0,"extra":1}]}"#).is_err());
        assert!(parse_circuit(r#"{"n_qubits":0,"gates":[]}"#).is_err());
        assert!(parse_circuit(r#"{"n_qubits":2,"gates":[],"registers":{"r":[2]}}"#).is_err());
    }

    #[test]
    fn generator_round_trip() {
        for c in [addition_circuit(3, 2).unwrap(), grover_circuit(3, 2).unwrap()] {
            let text = serialize_circuit(&c);
            let back = parse_circuit(&text).unwrap();
            assert_eq!(back, c);
            assert_eq!(serialize_circuit(&back), text);
        }
    }
}
