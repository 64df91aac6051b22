//! JSON encodings of matrices, states, channels, gates and experiments.
//!
//! Complex entries are written either as a bare number or as `[re, im]`;
//! matrices are arrays of rows. Every parse error names the offending field
//! with a path such as `channel.kraus[1][0][2]`.
//!
//! States:
//! - `{"dim": d, "matrix": M}` (`dim` optional), or a bare matrix
//! - `{"pure": [ψ₀, ψ₁, …]}`
//! - `{"type": "maximally_mixed", "dim": d}`, `{"type": "basis", "dim": d, "index": k}`
//!
//! Channels:
//! - `{"dim": d, "kraus": [M, …], "weights": [w, …]}` (`weights` optional)
//! - `{"type": "depolarizing", "dim": d, "p": p}`
//! - `{"type": "qubit_canonical", "v": [..], "t": [..], "u": M, "vmat": M}` (`u`, `vmat` optional)
//! - `{"type": "constant", "sigma": state}`, `{"type": "unitary", "u": M}`,
//!   `{"type": "identity", "dim": d}`, `{"type": "amplitude_damping", "gamma": γ}`
//! - `{"type": "compose", "outer": T, "inner": S}` for `T∘S`
//! - `{"type": "mix", "components": [{"weight": λ, "channel": T}, …]}`
//! - `{"type": "tensor", "channels": [T, S, …]}`
//!
//! Gates: a name such as `"H"` (qubit 0), `{"gate": "CNOT", "qubits": [0, 1]}`,
//! `{"matrix": M}` or a bare matrix.

use serde_json::{Map, Value};

use crate::channels::{
    amplitude_damping, compose, constant_channel, depolarizing, identity, mix, qubit_canonical, tensor,
    unitary_channel, QuantumChannel, QubitCanonicalForm,
};
use crate::dynamics::{named_gate, NoisyCircuit};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::scalar::{c, Real, C};
use crate::states::{basis_state, maximally_mixed, pure_state, DensityOperator};

fn schema(path: &str, reason: impl Into<String>) -> Error {
    Error::schema(path, reason)
}

/// Re-labels library errors raised while building an object at `path`.
fn at(path: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Schema { .. } => e,
        other => schema(path, other.to_string()),
    }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| schema(&join(path, key), "missing field"))
}

fn number<T: Real>(v: &Value, path: &str) -> Result<T> {
    let x = v.as_f64().ok_or_else(|| schema(path, "expected a number"))?;
    if !x.is_finite() {
        return Err(schema(path, "number is not finite"));
    }
    Ok(T::lit(x))
}

fn count(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| schema(path, "expected a nonnegative integer"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn real_triple<T: Real>(v: &Value, path: &str) -> Result<[T; 3]> {
    let items = array(v, path)?;
    if items.len() != 3 {
        return Err(schema(path, format!("expected 3 numbers, got {}", items.len())));
    }
    Ok([
        number(&items[0], &format!("{path}[0]"))?,
        number(&items[1], &format!("{path}[1]"))?,
        number(&items[2], &format!("{path}[2]"))?,
    ])
}

/// A complex entry: `x` or `[re, im]`.
pub fn parse_complex<T: Real>(v: &Value, path: &str) -> Result<C<T>> {
    match v {
        Value::Number(_) => Ok(c(number(v, path)?, T::zero())),
        Value::Array(parts) if parts.len() == 2 => Ok(c(
            number(&parts[0], &format!("{path}[0]"))?,
            number(&parts[1], &format!("{path}[1]"))?,
        )),
        _ => Err(schema(path, "expected a number or [re, im]")),
    }
}

pub fn parse_vector<T: Real>(v: &Value, path: &str) -> Result<Vec<C<T>>> {
    let items = array(v, path)?;
    if items.is_empty() {
        return Err(schema(path, "empty vector"));
    }
    items
        .iter()
        .enumerate()
        .map(|(i, x)| parse_complex(x, &format!("{path}[{i}]")))
        .collect()
}

/// Square complex matrix given as an array of rows.
pub fn parse_matrix<T: Real>(v: &Value, path: &str) -> Result<ComplexMatrix<T>> {
    let rows = array(v, path)?;
    let n = rows.len();
    if n == 0 {
        return Err(schema(path, "empty matrix"));
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let rpath = format!("{path}[{i}]");
        let entries = array(row, &rpath)?;
        if entries.len() != n {
            return Err(schema(&rpath, format!("row has {} entries, expected {n}", entries.len())));
        }
        for (j, x) in entries.iter().enumerate() {
            data.push(parse_complex(x, &format!("{rpath}[{j}]"))?);
        }
    }
    ComplexMatrix::new(n, n, data).map_err(at(path))
}

fn check_dim(obj: &Map<String, Value>, path: &str, actual: usize) -> Result<()> {
    if let Some(d) = obj.get("dim") {
        let d = count(d, &join(path, "dim"))?;
        if d != actual {
            return Err(schema(&join(path, "dim"), format!("declared {d}, data has dimension {actual}")));
        }
    }
    Ok(())
}

pub fn parse_state<T: Real>(v: &Value, path: &str) -> Result<DensityOperator<T>> {
    if v.is_array() {
        return DensityOperator::new(parse_matrix(v, path)?).map_err(at(path));
    }
    let obj = object(v, path)?;
    if let Some(kind) = obj.get("type") {
        let kind = kind.as_str().ok_or_else(|| schema(&join(path, "type"), "expected a string"))?;
        let dim = count(field(obj, "dim", path)?, &join(path, "dim"))?;
        return match kind {
            "maximally_mixed" => maximally_mixed(dim).map_err(at(path)),
            "basis" => {
                let k = count(field(obj, "index", path)?, &join(path, "index"))?;
                basis_state(dim, k).map_err(at(&join(path, "index")))
            }
            other => Err(schema(&join(path, "type"), format!("unknown state type `{other}`"))),
        };
    }
    if let Some(psi) = obj.get("pure") {
        let p = join(path, "pure");
        let psi = parse_vector(psi, &p)?;
        check_dim(obj, path, psi.len())?;
        return pure_state(&psi).map_err(at(&p));
    }
    let p = join(path, "matrix");
    let m = parse_matrix(field(obj, "matrix", path)?, &p)?;
    check_dim(obj, path, m.rows())?;
    DensityOperator::new(m).map_err(at(&p))
}

pub fn parse_channel<T: Real>(v: &Value, path: &str) -> Result<QuantumChannel<T>> {
    let obj = object(v, path)?;
    let Some(kind) = obj.get("type") else {
        return parse_raw_channel(obj, path);
    };
    let kind = kind.as_str().ok_or_else(|| schema(&join(path, "type"), "expected a string"))?;
    let num = |key: &str| -> Result<T> { number(field(obj, key, path)?, &join(path, key)) };
    let dim = || -> Result<usize> { count(field(obj, "dim", path)?, &join(path, "dim")) };
    match kind {
        "kraus" => parse_raw_channel(obj, path),
        "depolarizing" => depolarizing(dim()?, num("p")?).map_err(at(&join(path, "p"))),
        "identity" => identity(dim()?).map_err(at(path)),
        "amplitude_damping" => amplitude_damping(num("gamma")?).map_err(at(&join(path, "gamma"))),
        "unitary" => {
            let p = join(path, "u");
            let u = parse_matrix(field(obj, "u", path)?, &p)?;
            check_dim(obj, path, u.rows())?;
            unitary_channel(&u).map_err(at(&p))
        }
        "constant" => {
            let p = join(path, "sigma");
            let sigma = parse_state(field(obj, "sigma", path)?, &p)?;
            check_dim(obj, path, sigma.dim())?;
            constant_channel(&sigma).map_err(at(&p))
        }
        "qubit_canonical" => {
            let v = real_triple(field(obj, "v", path)?, &join(path, "v"))?;
            let t = match obj.get("t") {
                Some(t) => real_triple(t, &join(path, "t"))?,
                None => [T::zero(); 3],
            };
            let unitary = |key: &str| -> Result<ComplexMatrix<T>> {
                match obj.get(key) {
                    Some(m) => parse_matrix(m, &join(path, key)),
                    None => Ok(ComplexMatrix::identity(2)),
                }
            };
            let form = QubitCanonicalForm {
                u: unitary("u")?,
                v_mat: unitary("vmat")?,
                v,
                t,
            };
            qubit_canonical(&form).map_err(at(path))
        }
        "compose" => {
            let outer = parse_channel(field(obj, "outer", path)?, &join(path, "outer"))?;
            let inner = parse_channel(field(obj, "inner", path)?, &join(path, "inner"))?;
            compose(&outer, &inner).map_err(at(path))
        }
        "mix" => {
            let p = join(path, "components");
            let items = array(field(obj, "components", path)?, &p)?;
            let mut parts = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                let ip = format!("{p}[{i}]");
                let o = object(item, &ip)?;
                let w: T = number(field(o, "weight", &ip)?, &join(&ip, "weight"))?;
                let ch = parse_channel(field(o, "channel", &ip)?, &join(&ip, "channel"))?;
                parts.push((w, ch));
            }
            let refs: Vec<(T, &QuantumChannel<T>)> = parts.iter().map(|(w, ch)| (*w, ch)).collect();
            mix(&refs).map_err(at(&p))
        }
        "tensor" => {
            let p = join(path, "channels");
            let items = array(field(obj, "channels", path)?, &p)?;
            let mut it = items.iter().enumerate();
            let (_, first) = it.next().ok_or_else(|| schema(&p, "empty channel list"))?;
            let mut acc = parse_channel(first, &format!("{p}[0]"))?;
            for (i, item) in it {
                let next = parse_channel(item, &format!("{p}[{i}]"))?;
                acc = tensor(&acc, &next).map_err(at(&p))?;
            }
            Ok(acc)
        }
        other => Err(schema(&join(path, "type"), format!("unknown channel type `{other}`"))),
    }
}

fn parse_raw_channel<T: Real>(obj: &Map<String, Value>, path: &str) -> Result<QuantumChannel<T>> {
    let p = join(path, "kraus");
    let items = array(field(obj, "kraus", path)?, &p)?;
    if items.is_empty() {
        return Err(schema(&p, "empty Kraus list"));
    }
    let kraus: Vec<ComplexMatrix<T>> = items
        .iter()
        .enumerate()
        .map(|(i, m)| parse_matrix(m, &format!("{p}[{i}]")))
        .collect::<Result<_>>()?;
    let d = kraus[0].rows();
    if let Some((i, k)) = kraus.iter().enumerate().find(|(_, k)| k.rows() != d) {
        return Err(schema(&format!("{p}[{i}]"), format!("is {0}x{0}, expected {d}x{d}", k.rows())));
    }
    check_dim(obj, path, d)?;
    match obj.get("weights") {
        Some(w) => {
            let wp = join(path, "weights");
            let ws = array(w, &wp)?;
            if ws.len() != kraus.len() {
                return Err(schema(&wp, format!("{} weights for {} Kraus operators", ws.len(), kraus.len())));
            }
            let weights = ws
                .iter()
                .enumerate()
                .map(|(i, x)| number(x, &format!("{wp}[{i}]")))
                .collect::<Result<Vec<T>>>()?;
            QuantumChannel::from_weighted_kraus(d, kraus, weights).map_err(at(path))
        }
        None => QuantumChannel::from_kraus(d, kraus).map_err(at(path)),
    }
}

/// Gate acting on dimension `dim` (a power of two for named gates).
pub fn parse_gate<T: Real>(v: &Value, dim: usize, path: &str) -> Result<ComplexMatrix<T>> {
    let qubits = || -> Result<usize> {
        if dim.is_power_of_two() && dim >= 2 {
            Ok(dim.trailing_zeros() as usize)
        } else {
            Err(schema(path, format!("named gates need a qubit register, dimension is {dim}")))
        }
    };
    let m = match v {
        Value::String(name) => named_gate(name, &[0], qubits()?).map_err(at(path))?,
        Value::Array(_) => parse_matrix(v, path)?,
        Value::Object(obj) => {
            if let Some(m) = obj.get("matrix") {
                parse_matrix(m, &join(path, "matrix"))?
            } else {
                let gp = join(path, "gate");
                let name = field(obj, "gate", path)?
                    .as_str()
                    .ok_or_else(|| schema(&gp, "expected a gate name"))?;
                let qp = join(path, "qubits");
                let targets = match obj.get("qubits") {
                    Some(q) => array(q, &qp)?
                        .iter()
                        .enumerate()
                        .map(|(i, x)| count(x, &format!("{qp}[{i}]")))
                        .collect::<Result<Vec<usize>>>()?,
                    None => vec![0],
                };
                named_gate(name, &targets, qubits()?).map_err(at(path))?
            }
        }
        _ => return Err(schema(path, "expected a gate name, object or matrix")),
    };
    if m.rows() != dim {
        return Err(schema(path, format!("gate is {0}x{0}, system dimension is {dim}", m.rows())));
    }
    m.ensure_unitary(T::tol(crate::dynamics::GATE_TOL)).map_err(at(path))?;
    Ok(m)
}

/// `{"channel": …, "gates": [...], "initial": state | [state, state], "steps": n}`.
pub fn parse_experiment<T: Real>(v: &Value) -> Result<NoisyCircuit<T>> {
    let obj = object(v, "")?;
    let channel = parse_channel(field(obj, "channel", "")?, "channel")?;
    let dim = channel.dim();
    let gates = match obj.get("gates") {
        Some(g) => array(g, "gates")?
            .iter()
            .enumerate()
            .map(|(i, x)| parse_gate(x, dim, &format!("gates[{i}]")))
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let init = field(obj, "initial", "")?;
    let initial = match init {
        // a list of states, as opposed to a single state written as a bare matrix
        Value::Array(items) if items.first().is_some_and(|x| x.is_object()) => items
            .iter()
            .enumerate()
            .map(|(i, s)| parse_state(s, &format!("initial[{i}]")))
            .collect::<Result<Vec<_>>>()?,
        _ => vec![parse_state(init, "initial")?],
    };
    if initial.len() > 2 {
        return Err(schema("initial", "at most two initial states"));
    }
    let steps = count(field(obj, "steps", "")?, "steps")?;
    NoisyCircuit::new(gates, channel, initial, steps).map_err(at("channel"))
}

/// Code basis: `{"vectors": [v, …]}` or a bare array of vectors.
pub fn parse_code_basis<T: Real>(v: &Value, path: &str) -> Result<Vec<Vec<C<T>>>> {
    let (items, p) = match v {
        Value::Object(obj) => {
            let p = join(path, "vectors");
            (array(field(obj, "vectors", path)?, &p)?, p)
        }
        _ => (array(v, path)?, path.to_string()),
    };
    if items.is_empty() {
        return Err(schema(&p, "empty code basis"));
    }
    items
        .iter()
        .enumerate()
        .map(|(i, x)| parse_vector(x, &format!("{p}[{i}]")))
        .collect()
}
