//! Text rendering and parsing of Pauli sums.
//!
//! The rendered form follows the derivation-chain style: `-Z1Z2X3 + Y2`,
//! with 1-based qubit indices. Coefficients other than ±1 are printed in
//! front of the string (`0.5 X1Z2`). The parser accepts the same format
//! plus a few variants found in typeset sources: Unicode minus, `Z_1`
//! underscores, and Unicode subscript digits.
//!
//! When a system is a row of logical blocks, [`render_blocks`] labels qubits
//! per block: `X2(1)` is qubit 2 of block 1.

use crate::error::{Error, Result};
use crate::pauli::{Axis, PauliString, PauliSum};

/// Render a sum in chain style, terms in deterministic mask order.
pub fn render(sum: &PauliSum) -> String {
    render_impl(sum, None)
}

/// Render with per-block qubit labels, `n_phys` qubits per block.
pub fn render_blocks(sum: &PauliSum, n_phys: usize) -> String {
    render_impl(sum, Some(n_phys))
}

fn render_impl(sum: &PauliSum, blocks: Option<usize>) -> String {
    if sum.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (string, coeff)) in sum.iter().enumerate() {
        let sign = if coeff < 0.0 { '-' } else { '+' };
        if i == 0 {
            if coeff < 0.0 {
                out.push('-');
            }
        } else {
            out.push(' ');
            out.push(sign);
            out.push(' ');
        }
        let mag = coeff.abs();
        if string.is_identity() {
            out.push_str(&format_coefficient(mag));
        } else {
            if (mag - 1.0).abs() > f64::EPSILON {
                out.push_str(&format_coefficient(mag));
                out.push(' ');
            }
            out.push_str(&render_string_letters(&string, blocks));
        }
    }
    out
}

/// Render a single string's letters: `Z1Z2X3`, or `1` for the identity.
pub fn render_string(string: &PauliString) -> String {
    render_string_letters(string, None)
}

fn render_string_letters(string: &PauliString, blocks: Option<usize>) -> String {
    if string.is_identity() {
        return "1".to_string();
    }
    let mut out = String::new();
    for q in 1..=string.n_qubits() {
        if let Some(axis) = string.letter(q).expect("in range") {
            out.push(axis.letter());
            match blocks {
                Some(n_phys) => {
                    let block = (q - 1) / n_phys + 1;
                    let local = (q - 1) % n_phys + 1;
                    out.push_str(&format!("{local}({block})"));
                }
                None => out.push_str(&q.to_string()),
            }
        }
    }
    out
}

fn format_coefficient(mag: f64) -> String {
    if mag == mag.trunc() && mag.abs() < 1e15 {
        format!("{}", mag as i64)
    } else {
        format!("{mag}")
    }
}

/// Parse a sum in the rendered format. `n_qubits` fixes the register size.
pub fn parse(input: &str, n_qubits: usize) -> Result<PauliSum> {
    parse_impl(input, n_qubits, None)
}

/// Parse with block labels (`X2(1)`), `n_phys` qubits per block.
pub fn parse_blocks(input: &str, n_qubits: usize, n_phys: usize) -> Result<PauliSum> {
    parse_impl(input, n_qubits, Some(n_phys))
}

fn parse_impl(input: &str, n_qubits: usize, blocks: Option<usize>) -> Result<PauliSum> {
    let normalized = normalize(input);
    let mut sum = PauliSum::zero(n_qubits);
    if normalized.trim() == "0" {
        return Ok(sum);
    }
    let mut chars = normalized.chars().peekable();
    let mut any = false;
    loop {
        skip_spaces(&mut chars);
        if chars.peek().is_none() {
            break;
        }
        let mut sign = 1.0;
        while let Some(&c) = chars.peek() {
            match c {
                '+' => {
                    chars.next();
                }
                '-' => {
                    sign = -sign;
                    chars.next();
                }
                ' ' => {
                    chars.next();
                }
                _ => break,
            }
        }
        skip_spaces(&mut chars);
        // optional numeric coefficient
        let mut coeff = 1.0;
        let mut had_number = false;
        if chars.peek().is_some_and(|c| c.is_ascii_digit() || *c == '.') {
            let mut num = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' {
                    num.push(c);
                    chars.next();
                } else if (c == '+' || c == '-') && num.ends_with(['e', 'E']) {
                    num.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            coeff = num
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad coefficient `{num}`")))?;
            had_number = true;
            // optional multiplication dot/star
            if chars.peek() == Some(&'*') || chars.peek() == Some(&'·') {
                chars.next();
            }
            skip_spaces(&mut chars);
        }
        // letters; spaces inside a term are allowed (`Z_1 Z_2` is one string)
        let mut axes: Vec<(usize, Axis)> = Vec::new();
        loop {
            skip_spaces(&mut chars);
            let Some(&c) = chars.peek() else { break };
            let axis = match c {
                'X' | 'x' => Axis::X,
                'Y' | 'y' => Axis::Y,
                'Z' | 'z' => Axis::Z,
                'I' | 'i' => {
                    chars.next();
                    // explicit identity letter: consume optional index
                    let _ = read_index(&mut chars);
                    continue;
                }
                _ => break,
            };
            chars.next();
            if chars.peek() == Some(&'_') {
                chars.next();
            }
            let idx =
                read_index(&mut chars).ok_or_else(|| Error::Parse("missing index".into()))?;
            let q = match blocks {
                Some(n_phys) => {
                    skip_spaces(&mut chars);
                    if chars.peek() == Some(&'(') {
                        chars.next();
                        let block = read_index(&mut chars)
                            .ok_or_else(|| Error::Parse("missing block label".into()))?;
                        if chars.next() != Some(')') {
                            return Err(Error::Parse("unclosed block label".into()));
                        }
                        (block - 1) * n_phys + idx
                    } else {
                        idx
                    }
                }
                None => idx,
            };
            if q == 0 || q > n_qubits {
                return Err(Error::Parse(format!(
                    "qubit index {q} out of range for {n_qubits} qubits"
                )));
            }
            axes.push((q, axis));
        }
        if axes.is_empty() && !had_number {
            return Err(Error::Parse(format!("could not parse `{input}`")));
        }
        if let Some(&c) = chars.peek() {
            if c != '+' && c != '-' && c != ' ' {
                return Err(Error::Parse(format!("unexpected character `{c}`")));
            }
        }
        let string = PauliString::from_axes(n_qubits, &axes)
            .map_err(|e| Error::Parse(format!("{e} in `{input}`")))?;
        sum.add_string(&string, sign * coeff)?;
        any = true;
    }
    if !any {
        return Err(Error::Parse("empty operator text".into()));
    }
    Ok(sum)
}

fn skip_spaces(chars: &mut std::iter::Peekable<std::str::Chars<'_>>) {
    while chars.peek() == Some(&' ') {
        chars.next();
    }
}

fn read_index(chars: &mut std::iter::Peekable<std::str::Chars<'_>>) -> Option<usize> {
    let mut s = String::new();
    while let Some(&c) = chars.peek() {
        if c.is_ascii_digit() {
            s.push(c);
            chars.next();
        } else {
            break;
        }
    }
    s.parse().ok()
}

/// Map Unicode minus signs and subscript digits onto their ASCII forms.
fn normalize(input: &str) -> String {
    input
        .chars()
        .map(|c| match c {
            '−' | '–' => '-',
            '₀' => '0',
            '₁' => '1',
            '₂' => '2',
            '₃' => '3',
            '₄' => '4',
            '₅' => '5',
            '₆' => '6',
            '₇' => '7',
            '₈' => '8',
            '₉' => '9',
            _ => c,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliSum;

    #[test]
    fn renders_chain_style() {
        let mut sum = PauliSum::zero(3);
        sum.add_string(
            &PauliString::from_axes(3, &[(1, Axis::Z), (2, Axis::Z), (3, Axis::X)]).unwrap(),
            -1.0,
        )
        .unwrap();
        sum.add_string(&PauliString::single(3, 2, Axis::Y).unwrap(), 1.0)
            .unwrap();
        let text = render(&sum);
        let back = parse(&text, 3).unwrap();
        assert!(back.exact_eq(&sum));
        assert!(text.contains("Z1Z2X3"));
        assert!(text.contains("Y2"));
    }

    #[test]
    fn parses_typeset_variants() {
        let a = parse("−Z₁Z₂X₃ + Y₂", 3).unwrap();
        let b = parse("-Z_1 Z_2 X_3 + Y_2", 3).unwrap();
        assert!(a.exact_eq(&b));
    }

    #[test]
    fn parses_coefficients_and_identity() {
        let s = parse("0.5 X1 - 2 Z2 + 1", 2).unwrap();
        assert_eq!(
            s.coefficient(&PauliString::single(2, 1, Axis::X).unwrap()),
            0.5
        );
        assert_eq!(
            s.coefficient(&PauliString::single(2, 2, Axis::Z).unwrap()),
            -2.0
        );
        assert_eq!(s.coefficient(&PauliString::identity(2)), 1.0);
        let rendered = render(&s);
        assert!(parse(&rendered, 2).unwrap().exact_eq(&s));
    }

    #[test]
    fn block_labels_round_trip() {
        let mut sum = PauliSum::zero(10);
        sum.add_string(&PauliString::single(10, 7, Axis::X).unwrap(), 1.0)
            .unwrap();
        let text = render_blocks(&sum, 5);
        assert_eq!(text, "X2(2)");
        let back = parse_blocks(&text, 10, 5).unwrap();
        assert!(back.exact_eq(&sum));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse("Z1 + Q2", 2).is_err());
        assert!(parse("Z9", 2).is_err());
        assert!(parse("", 2).is_err());
    }
}
