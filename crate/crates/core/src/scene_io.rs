//! JSON scene files. Any number may be written as a constant expression
//! such as "2*pi" or "250*pi/127" (numbers, pi, + - * /, parentheses).
//! Writing emits such expressions for exact rational multiples of pi.

use crate::error::{Error, Result};
use crate::geometry::Scene;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use std::path::Path;

/// Keys whose string values are names rather than numbers.
const TEXT_KEYS: [&str; 5] = ["name", "label", "type", "polarization", "parity"];

pub fn parse_scene(text: &str) -> Result<Scene> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("scene file: {e}")))?;
    let siw_cladding = take_cladding(&mut v);
    substitute(&mut v, "", None)?;
    let scene: Scene = serde_path_to_error::deserialize(v)
        .map_err(|e| Error::Parse(format!("scene file at '{}': {}", e.path(), e.inner())))?;
    scene.validate()?;
    for (i, c) in siw_cladding {
        let c = c.map_err(|m| Error::Parse(format!("scene file at 'siws[{i}].cladding': {m}")))?;
        let info = scene.siw_info(i)?;
        if !info.cladding.contains(&c) {
            return Err(Error::Config(format!(
                "waveguide {i} lists cladding region {c}, but its walls border regions {:?}",
                info.cladding
            )));
        }
    }
    Ok(scene)
}

pub fn load_scene(path: &Path) -> Result<Scene> {
    let text = std::fs::read_to_string(path)?;
    parse_scene(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Pretty JSON with pi-rational numbers written as expressions and each
/// waveguide annotated with the cladding region of its +1 side.
pub fn scene_to_json(scene: &Scene) -> String {
    let mut v = serde_json::to_value(scene).expect("scene serializes");
    if let Some(siws) = v.get_mut("siws").and_then(Value::as_array_mut) {
        for (i, s) in siws.iter_mut().enumerate() {
            if let (Ok(info), Some(obj)) = (scene.siw_info(i), s.as_object_mut()) {
                obj.insert("cladding".into(), Value::from(info.cladding[0]));
            }
        }
    }
    format_numbers(&mut v);
    serde_json::to_string_pretty(&v).expect("json value serializes") + "\n"
}

pub fn save_scene(scene: &Scene, path: &Path) -> Result<()> {
    std::fs::write(path, scene_to_json(scene))?;
    Ok(())
}

/// Hex SHA-256 of the canonical compact JSON, truncated to 16 digits.
pub fn scene_hash(scene: &Scene) -> String {
    let canon = serde_json::to_string(scene).expect("scene serializes");
    let d = Sha256::digest(canon.as_bytes());
    d.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

type CladdingEntry = (usize, std::result::Result<usize, String>);

fn take_cladding(v: &mut Value) -> Vec<CladdingEntry> {
    let mut out = Vec::new();
    if let Some(siws) = v.get_mut("siws").and_then(Value::as_array_mut) {
        for (i, s) in siws.iter_mut().enumerate() {
            if let Some(c) = s.as_object_mut().and_then(|o| o.remove("cladding")) {
                let id = c.as_u64().map(|x| x as usize).ok_or_else(|| format!("expected a region id, got {c}"));
                out.push((i, id));
            }
        }
    }
    out
}

fn substitute(v: &mut Value, path: &str, key: Option<&str>) -> Result<()> {
    match v {
        Value::String(s) if !key.is_some_and(|k| TEXT_KEYS.contains(&k)) => {
            let x = eval_expr(s).map_err(|m| Error::Parse(format!("scene file at '{path}': {m}")))?;
            *v = Value::from(x);
        }
        Value::Array(a) => {
            for (i, e) in a.iter_mut().enumerate() {
                substitute(e, &format!("{path}[{i}]"), key)?;
            }
        }
        Value::Object(o) => {
            for (k, e) in o.iter_mut() {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                substitute(e, &p, Some(k))?;
            }
        }
        _ => {}
    }
    Ok(())
}

fn format_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(s) = n.as_f64().and_then(pi_rational) {
                *v = Value::String(s);
            }
        }
        Value::Array(a) => a.iter_mut().for_each(format_numbers),
        Value::Object(o) => o.values_mut().for_each(format_numbers),
        _ => {}
    }
}

/// "p*pi/q" with q <= 1000 when that expression evaluates to exactly `x`.
pub fn pi_rational(x: f64) -> Option<String> {
    if x == 0.0 || !x.is_finite() {
        return None;
    }
    for q in 1..=1000u32 {
        let p = (x * q as f64 / PI).round();
        if p == 0.0 || p.abs() > 1e6 {
            continue;
        }
        let num = match p as i64 {
            1 => "pi".to_string(),
            -1 => "-pi".to_string(),
            p => format!("{p}*pi"),
        };
        let s = if q == 1 { num } else { format!("{num}/{q}") };
        if eval_expr(&s).ok() == Some(x) {
            return Some(s);
        }
    }
    None
}

/// Evaluate a constant expression over numbers and `pi`, left to right
/// within each precedence level.
pub fn eval_expr(s: &str) -> std::result::Result<f64, String> {
    let tokens = tokenize(s)?;
    let mut p = ExprParser { tokens: &tokens, pos: 0 };
    let v = p.sum()?;
    if p.pos != tokens.len() {
        return Err(format!("unexpected trailing input in expression '{s}'"));
    }
    if !v.is_finite() {
        return Err(format!("expression '{s}' is not finite"));
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Num(f64),
    Op(char),
    Open,
    Close,
}

fn tokenize(s: &str) -> std::result::Result<Vec<Tok>, String> {
    let mut out = Vec::new();
    let b = s.as_bytes();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '+' | '-' | '*' | '/' => {
                out.push(Tok::Op(c));
                i += 1;
            }
            '(' => {
                out.push(Tok::Open);
                i += 1;
            }
            ')' => {
                out.push(Tok::Close);
                i += 1;
            }
            _ if s[i..].starts_with("pi") => {
                out.push(Tok::Num(PI));
                i += 2;
            }
            _ if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                    i += 1;
                }
                if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                    i += 1;
                    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
                        i += 1;
                    }
                    while i < b.len() && b[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                let lit = &s[start..i];
                out.push(Tok::Num(lit.parse().map_err(|_| format!("bad number '{lit}' in expression '{s}'"))?));
            }
            _ => return Err(format!("unexpected '{c}' in expression '{s}'")),
        }
    }
    Ok(out)
}

struct ExprParser<'a> {
    tokens: &'a [Tok],
    pos: usize,
}

impl ExprParser<'_> {
    fn peek(&self) -> Option<Tok> {
        self.tokens.get(self.pos).copied()
    }

    fn sum(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.product()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            self.pos += 1;
            let r = self.product()?;
            v = if c == '+' { v + r } else { v - r };
        }
        Ok(v)
    }

    fn product(&mut self) -> std::result::Result<f64, String> {
        let mut v = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            self.pos += 1;
            let r = self.unary()?;
            v = if c == '*' { v * r } else { v / r };
        }
        Ok(v)
    }

    fn unary(&mut self) -> std::result::Result<f64, String> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            Some(Tok::Num(x)) => {
                self.pos += 1;
                Ok(x)
            }
            Some(Tok::Open) => {
                self.pos += 1;
                let v = self.sum()?;
                if self.peek() != Some(Tok::Close) {
                    return Err("missing ')'".into());
                }
                self.pos += 1;
                Ok(v)
            }
            Some(t) => Err(format!("unexpected token {t:?}")),
            None => Err("expression ends early".into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expressions() {
        assert_eq!(eval_expr("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(eval_expr("250*pi/127").unwrap(), 250.0 * PI / 127.0);
        assert_eq!(eval_expr("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(eval_expr("1 + 2 * 3").unwrap(), 7.0);
        assert_eq!(eval_expr("(1 + 2) * 3").unwrap(), 9.0);
        assert_eq!(eval_expr("1e-3").unwrap(), 1e-3);
        assert!(eval_expr("2*").is_err());
        assert!(eval_expr("2 pi").is_err());
        assert!(eval_expr("1/0").is_err());
        assert!(eval_expr("tau").is_err());
    }

    #[test]
    fn pi_rationals() {
        assert_eq!(pi_rational(2.0 * PI).as_deref(), Some("2*pi"));
        assert_eq!(pi_rational(PI).as_deref(), Some("pi"));
        assert_eq!(pi_rational(250.0 * PI / 127.0).as_deref(), Some("250*pi/127"));
        assert_eq!(pi_rational(-PI / 2.0).as_deref(), Some("-pi/2"));
        assert_eq!(pi_rational(0.5), None);
        assert_eq!(pi_rational(3.0), None);
    }
}
