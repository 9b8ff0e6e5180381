//! Parser for the graph family grammar:
//!
//! ```text
//! spec := kks(c,m) | complete(c) | cycle(k) | spider(d,l)
//!       | spidercycle(d,l,k) | spidertorus(d,l,k1,k2)
//!       | cart(spec,spec) | tensor(spec,spec)
//! ```

use walkent::{graph, Graph};

pub const GRAMMAR: &str = "kks(c,m) | complete(c) | cycle(k) | spider(d,l) | \
     spidercycle(d,l,k) | spidertorus(d,l,k1,k2) | cart(spec,spec) | tensor(spec,spec)";

pub fn parse(input: &str) -> Result<Graph, String> {
    let mut p = Parser {
        chars: input.chars().collect(),
        pos: 0,
    };
    let g = p.spec()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(format!(
            "trailing input at offset {} in family spec; grammar: {GRAMMAR}",
            p.pos
        ));
    }
    Ok(g)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char, production: &str) -> Result<(), String> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(format!("expected '{c}' in {production}; grammar: {GRAMMAR}"))
        }
    }

    fn ident(&mut self) -> Result<String, String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format!("expected a family name; grammar: {GRAMMAR}"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn integer(&mut self, production: &str) -> Result<usize, String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format!(
                "expected an integer argument in {production}; grammar: {GRAMMAR}"
            ));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse()
            .map_err(|_| format!("integer out of range in {production}"))
    }

    fn int_args(&mut self, count: usize, production: &str) -> Result<Vec<usize>, String> {
        self.expect('(', production)?;
        let mut args = Vec::with_capacity(count);
        for i in 0..count {
            if i > 0 {
                self.expect(',', production)?;
            }
            args.push(self.integer(production)?);
        }
        self.expect(')', production)?;
        Ok(args)
    }

    fn spec(&mut self) -> Result<Graph, String> {
        let name = self.ident()?;
        let build = |r: walkent::Result<Graph>| r.map_err(|e| e.to_string());
        match name.as_str() {
            "kks" => {
                let a = self.int_args(2, "kks(c,m)")?;
                build(graph::kks_graph(a[0], a[1]))
            }
            "complete" => {
                let a = self.int_args(1, "complete(c)")?;
                build(graph::complete_graph(a[0]))
            }
            "cycle" => {
                let a = self.int_args(1, "cycle(k)")?;
                build(graph::cycle_graph(a[0]))
            }
            "spider" => {
                let a = self.int_args(2, "spider(d,l)")?;
                build(graph::spider(a[0], a[1]))
            }
            "spidercycle" => {
                let a = self.int_args(3, "spidercycle(d,l,k)")?;
                build(graph::spider_cycle(a[0], a[1], a[2]))
            }
            "spidertorus" => {
                let a = self.int_args(4, "spidertorus(d,l,k1,k2)")?;
                build(graph::spider_torus(a[0], a[1], a[2], a[3]))
            }
            "cart" | "tensor" => {
                let production = if name == "cart" {
                    "cart(spec,spec)"
                } else {
                    "tensor(spec,spec)"
                };
                self.expect('(', production)?;
                let g = self.spec()?;
                self.expect(',', production)?;
                let h = self.spec()?;
                self.expect(')', production)?;
                Ok(if name == "cart" {
                    graph::cartesian_product(&g, &h)
                } else {
                    graph::tensor_product(&g, &h)
                })
            }
            other => Err(format!("unknown family '{other}'; grammar: {GRAMMAR}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_families() {
        assert_eq!(parse("kks(4,5)").unwrap().n(), 24);
        assert_eq!(parse("spidertorus(4,2,5,3)").unwrap().n(), 135);
        assert_eq!(parse("cart(kks(4,5), cycle(3))").unwrap().n(), 72);
        assert_eq!(parse("tensor(complete(2),complete(3))").unwrap().n(), 6);
        assert_eq!(parse(" cycle( 5 ) ").unwrap().n(), 5);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(parse("petersen(5)").unwrap_err().contains("unknown family"));
        assert!(parse("kks(4)").unwrap_err().contains("kks(c,m)"));
        assert!(parse("cycle(2)").unwrap_err().contains("k >= 3"));
        assert!(parse("kks(4,5)x").unwrap_err().contains("trailing"));
    }
}
