//! Reader for the TRS text format:
//!
//! ```text
//! file := decl*
//! decl := "(VAR" ident* ")" | "(RULES" rule* ")" | "(COMMENT" text ")"
//! rule := term "->" term
//! term := ident | ident "(" term ("," term)* ")"
//! ```
//!
//! Comment text is free except that its parentheses must balance.

use std::collections::BTreeSet;

use super::{Rule, Term, TermError, Trs, sym};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Comma,
    Arrow,
    Ident(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn ident_char(c: char, marks: bool) -> bool {
    c.is_ascii_alphanumeric() || "_+'∘-⋄".contains(c) || (marks && c == '#')
}

fn lex(text: &str, marks: bool) -> Result<Vec<Spanned>, TermError> {
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut col) = (1, 1);
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let at = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                *i += 1;
            }
        };
        let push = |tok, out: &mut Vec<Spanned>| {
            out.push(Spanned {
                tok,
                line: at.0,
                col: at.1,
            })
        };
        match c {
            _ if c.is_whitespace() => advance(1, &mut i),
            '(' => {
                push(Tok::Open, &mut out);
                advance(1, &mut i);
            }
            ')' => {
                push(Tok::Close, &mut out);
                advance(1, &mut i);
            }
            ',' => {
                push(Tok::Comma, &mut out);
                advance(1, &mut i);
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                push(Tok::Arrow, &mut out);
                advance(2, &mut i);
            }
            _ if ident_char(c, marks) => {
                let mut s = String::new();
                while i < chars.len()
                    && ident_char(chars[i], marks)
                    && !(chars[i] == '-' && chars.get(i + 1) == Some(&'>'))
                {
                    s.push(chars[i]);
                    advance(1, &mut i);
                }
                push(Tok::Ident(s), &mut out);
            }
            _ => {
                return Err(TermError::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character {c:?}"),
                })
            }
        }
    }
    Ok(out)
}

/// Symbol tree before variables are resolved.
#[derive(Debug, Clone)]
struct Raw {
    name: String,
    args: Vec<Raw>,
    line: usize,
    col: usize,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn err(&self, msg: impl Into<String>) -> TermError {
        let (line, col) = match self.toks.get(self.pos).or(self.toks.last()) {
            Some(s) => (s.line, s.col),
            None => (1, 1),
        };
        TermError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, t: Tok) -> Result<(), TermError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected {t:?}")))
        }
    }

    fn ident(&mut self) -> Result<(String, usize, usize), TermError> {
        match self.toks.get(self.pos) {
            Some(Spanned {
                tok: Tok::Ident(s),
                line,
                col,
            }) => {
                let r = (s.clone(), *line, *col);
                self.pos += 1;
                Ok(r)
            }
            _ => Err(self.err("expected identifier")),
        }
    }

    fn term(&mut self) -> Result<Raw, TermError> {
        let (name, line, col) = self.ident()?;
        let mut args = Vec::new();
        if self.peek() == Some(&Tok::Open) {
            self.pos += 1;
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Some(Tok::Comma) => self.pos += 1,
                    Some(Tok::Close) => {
                        self.pos += 1;
                        break;
                    }
                    _ => return Err(self.err("expected ',' or ')'")),
                }
            }
        }
        Ok(Raw {
            name,
            args,
            line,
            col,
        })
    }

}

fn resolve(raw: &Raw, vars: &BTreeSet<String>) -> Result<Term, TermError> {
    if vars.contains(&raw.name) {
        if !raw.args.is_empty() {
            return Err(TermError::Syntax {
                line: raw.line,
                col: raw.col,
                msg: format!("variable {} applied to arguments", raw.name),
            });
        }
        return Ok(Term::Var(sym(&raw.name)));
    }
    let args = raw
        .args
        .iter()
        .map(|a| resolve(a, vars))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Term::App(sym(&raw.name), args))
}

/// Parses a whole TRS file. Rule order is source order.
/// Replaces every `(COMMENT ...)` block, nested parentheses included, by
/// spaces so that comments may hold arbitrary text and positions stay put.
fn blank_comments(text: &str) -> Result<String, TermError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = chars.clone();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '(' {
            let mut j = i + 1;
            while j < chars.len() && chars[j].is_whitespace() {
                j += 1;
            }
            let kw: String = chars[j..].iter().take(7).collect();
            let after = chars.get(j + 7).copied();
            if kw == "COMMENT" && after.map_or(true, |c| c.is_whitespace() || c == '(' || c == ')') {
                let mut depth = 0usize;
                let mut k = i;
                loop {
                    let Some(&c) = chars.get(k) else {
                        let line = chars[..i].iter().filter(|&&c| c == '\n').count() + 1;
                        return Err(TermError::Syntax { line, col: 1, msg: "unterminated COMMENT".into() });
                    };
                    match c {
                        '(' => depth += 1,
                        ')' => depth -= 1,
                        _ => {}
                    }
                    if c != '\n' {
                        out[k] = ' ';
                    }
                    k += 1;
                    if depth == 0 {
                        break;
                    }
                }
                i = k;
                continue;
            }
        }
        i += 1;
    }
    Ok(out.into_iter().collect())
}

pub fn parse_trs(text: &str) -> Result<Trs, TermError> {
    let mut p = Parser {
        toks: lex(&blank_comments(text)?, false)?,
        pos: 0,
    };
    let mut vars = BTreeSet::new();
    let mut raw_rules = Vec::new();
    while p.peek().is_some() {
        p.expect(Tok::Open)?;
        let (kw, _, _) = p.ident()?;
        match kw.as_str() {
            "VAR" => {
                while let Some(Tok::Ident(_)) = p.peek() {
                    vars.insert(p.ident()?.0);
                }
                p.expect(Tok::Close)?;
            }
            "RULES" => {
                while p.peek() != Some(&Tok::Close) {
                    if p.peek().is_none() {
                        return Err(p.err("unterminated RULES"));
                    }
                    let l = p.term()?;
                    p.expect(Tok::Arrow)?;
                    let r = p.term()?;
                    raw_rules.push((l, r));
                }
                p.pos += 1;
            }
            other => return Err(p.err(format!("unknown declaration {other}"))),
        }
    }
    let rules = raw_rules
        .iter()
        .map(|(l, r)| Rule::new(resolve(l, &vars)?, resolve(r, &vars)?))
        .collect::<Result<Vec<_>, _>>()?;
    Trs::new(rules)
}

/// Parses a single term; identifiers listed in `vars` are variables.
pub fn parse_term(text: &str, vars: &[&str]) -> Result<Term, TermError> {
    parse_term_with(text, vars, false)
}

/// As [`parse_term`], optionally accepting marked symbols such as `f#`.
pub fn parse_term_with(text: &str, vars: &[&str], marks: bool) -> Result<Term, TermError> {
    let mut p = Parser {
        toks: lex(text, marks)?,
        pos: 0,
    };
    let raw = p.term()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input after term"));
    }
    let vars = vars.iter().map(|s| s.to_string()).collect();
    resolve(&raw, &vars)
}

/// Parses `l -> r` rules separated by whitespace (no declarations), for
/// building systems in code.
pub fn parse_rules(text: &str, vars: &[&str], marks: bool) -> Result<Vec<Rule>, TermError> {
    let mut p = Parser {
        toks: lex(text, marks)?,
        pos: 0,
    };
    let vars: BTreeSet<String> = vars.iter().map(|s| s.to_string()).collect();
    let mut out = Vec::new();
    while p.peek().is_some() {
        let l = p.term()?;
        p.expect(Tok::Arrow)?;
        let r = p.term()?;
        out.push(Rule::new(resolve(&l, &vars)?, resolve(&r, &vars)?)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_rule_system() {
        let r = parse_trs("(VAR x) (RULES f(s(x)) -> s(f(f(x))))").unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.defined().iter().map(|s| &**s).collect::<Vec<_>>(), ["f"]);
        assert_eq!(r.constructors().iter().map(|s| &**s).collect::<Vec<_>>(), ["s"]);
    }

    #[test]
    fn empty_rules() {
        let r = parse_trs("(RULES )").unwrap();
        assert!(r.is_empty());
        assert!(r.defined().is_empty());
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_trs("(VAR x y) (RULES x -> y)"),
            Err(TermError::IllFormedRule { .. })
        ));
        assert!(matches!(
            parse_trs("(VAR x y) (RULES f(x) -> g(y))"),
            Err(TermError::IllFormedRule { .. })
        ));
        assert!(matches!(
            parse_trs("(VAR x) (RULES f(x) -> f(x,x))"),
            Err(TermError::ArityClash { .. })
        ));
        assert!(matches!(parse_trs("(RULES f(x -> x)"), Err(TermError::Syntax { .. })));
        assert!(matches!(parse_trs("(RULES f# -> a)"), Err(TermError::Syntax { .. })));
        assert!(matches!(parse_trs("(FOO)"), Err(TermError::Syntax { .. })));
    }

    #[test]
    fn comments_and_odd_identifiers() {
        let r = parse_trs(
            "(COMMENT a (nested) comment -> with arrows)\n(VAR x y)\n(RULES\n  x∘_2(i(y)) -> y'-1\n  a+b -> c)",
        )
        .unwrap();
        assert_eq!(r.len(), 2);
        // `x∘_2` is a single identifier, so this is a unary symbol, not a variable
        assert_eq!(r.rules()[0].to_string(), "x∘_2(i(y)) -> y'-1");
        let r = parse_trs("( COMMENT k = 2, labels 3_{0,1}; f#1 )\n(RULES a -> b)").unwrap();
        assert_eq!(r.len(), 1);
        let err = parse_trs("(RULES a -> b)\n(COMMENT open (").unwrap_err();
        assert!(matches!(err, TermError::Syntax { line: 2, .. }), "{err:?}");
        // a symbol that merely starts with the keyword is not a comment
        assert!(parse_trs("(RULES COMMENTS -> b)").is_ok());
    }

    #[test]
    fn roundtrip() {
        let src = "(VAR x y z) (RULES i(x) ∘ (y ∘ z) -> x)";
        // infix is not part of the grammar
        assert!(parse_trs(src).is_err());
        let src = "(VAR x y z)(RULES f(x,i(x)) -> g(x) g(g(y)) -> h(y,z,z) )";
        assert!(parse_trs(src).is_err(), "z only on the right");
        let src = "(VAR x y)(RULES f(x,i(x)) -> g(x) g(g(y)) -> h(y,y,y) c -> d)";
        let once = parse_trs(src).unwrap();
        let twice = parse_trs(&once.to_text()).unwrap();
        assert_eq!(once, twice);
        assert_eq!(twice.to_text(), once.to_text());
    }

    #[test]
    fn marked_terms() {
        let t = parse_term_with("f#(s(x))", &["x"], true).unwrap();
        assert_eq!(t.root().map(|s| &**s), Some("f#"));
        assert!(parse_term("f#(x)", &["x"]).is_err());
    }
}
