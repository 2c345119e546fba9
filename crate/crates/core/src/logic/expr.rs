//! Infix Boolean expressions over stage variables, e.g. `x3 ^ x1 & x2`.
//!
//! Precedence from tightest: `~` (or postfix `'`), `&`, `^`, `|`.

use std::collections::BTreeMap;

use super::{LogicError, Netlist, NetlistBuilder, NodeId};

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    builder: &'a mut NetlistBuilder,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> LogicError {
        LogicError::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, ch: char) -> bool {
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&ch) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn or(&mut self) -> Result<NodeId, LogicError> {
        let mut acc = self.xor()?;
        while self.eat('|') {
            let rhs = self.xor()?;
            acc = self.builder.or(acc, rhs);
        }
        Ok(acc)
    }

    fn xor(&mut self) -> Result<NodeId, LogicError> {
        let mut acc = self.and()?;
        while self.eat('^') {
            let rhs = self.and()?;
            acc = self.builder.xor(acc, rhs);
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<NodeId, LogicError> {
        let mut acc = self.unary()?;
        while self.eat('&') {
            let rhs = self.unary()?;
            acc = self.builder.and(acc, rhs);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<NodeId, LogicError> {
        if self.eat('~') {
            let inner = self.unary()?;
            return Ok(self.builder.not(inner));
        }
        let mut node = self.atom()?;
        while self.eat('\'') {
            node = self.builder.not(node);
        }
        Ok(node)
    }

    fn atom(&mut self) -> Result<NodeId, LogicError> {
        self.skip_ws();
        match self.chars.get(self.pos).copied() {
            Some('(') => {
                self.pos += 1;
                let node = self.or()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(node)
            }
            Some('0') => {
                self.pos += 1;
                Ok(self.builder.constant(false))
            }
            Some('1') => {
                self.pos += 1;
                Ok(self.builder.constant(true))
            }
            Some('x') => {
                self.pos += 1;
                let start = self.pos;
                while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let digits: String = self.chars[start..self.pos].iter().collect();
                let stage = digits
                    .parse()
                    .map_err(|_| self.error("expected a stage number after 'x'"))?;
                Ok(self.builder.input(stage))
            }
            Some(other) => Err(self.error(format!("unexpected character {other:?}"))),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}

/// Parses `text` into `builder`, returning the node computing it.
pub fn parse_expr(text: &str, builder: &mut NetlistBuilder) -> Result<NodeId, LogicError> {
    let mut parser = Parser {
        chars: text.chars().collect(),
        pos: 0,
        builder,
    };
    let node = parser.or()?;
    parser.skip_ws();
    if parser.pos != parser.chars.len() {
        return Err(parser.error("trailing input"));
    }
    Ok(node)
}

/// Builds a netlist from `(stage, expression)` pairs, e.g.
/// `[(3, "x0 ^ x3"), (2, "x3 ^ x1 & x2")]`. Declared inputs are `inputs`
/// followed by any further stages the expressions mention.
pub fn netlist_from_assignments(
    inputs: &[usize],
    assignments: &[(usize, &str)],
) -> Result<Netlist, LogicError> {
    let mut builder = NetlistBuilder::with_inputs(inputs);
    let mut outputs = BTreeMap::new();
    for &(stage, text) in assignments {
        let node = parse_expr(text, &mut builder)?;
        outputs.insert(stage, node);
    }
    Ok(builder.finish(outputs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let net = netlist_from_assignments(&[0, 1, 2], &[(0, "x0 ^ x1 & x2 | 0")]).unwrap();
        for p in 0..8u32 {
            let x: Vec<bool> = (0..3).map(|j| p >> j & 1 == 1).collect();
            let expected = x[0] ^ (x[1] & x[2]);
            assert_eq!(net.evaluate(&x).unwrap(), vec![expected]);
        }
        assert_eq!(net.gate_count(), 2);
    }

    #[test]
    fn complements() {
        let net = netlist_from_assignments(&[2, 3], &[(0, "(x2 ^ x3)' ^ ~x3")]).unwrap();
        for p in 0..4u32 {
            let (a, b) = (p & 1 == 1, p & 2 == 2);
            assert_eq!(net.evaluate(&[a, b]).unwrap(), vec![!(a ^ b) ^ !b]);
        }
    }

    #[test]
    fn reports_errors() {
        let mut b = NetlistBuilder::new();
        assert!(matches!(
            parse_expr("x1 & ", &mut b),
            Err(LogicError::Parse { .. })
        ));
        assert!(matches!(
            parse_expr("(x1", &mut b),
            Err(LogicError::Parse { .. })
        ));
        assert!(matches!(
            parse_expr("y2", &mut b),
            Err(LogicError::Parse { position: 0, .. })
        ));
    }
}
