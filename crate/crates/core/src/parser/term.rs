//! Ground terms for initial stores: `C(t1, ..., tn)`, a nullary `C`, or a
//! decimal numeral shorthand.

use num::BigUint;

use super::error::ParseError;
use super::lexer::{Cursor, Tok};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Ctor(String, Vec<Term>),
    Numeral(BigUint),
}

fn term(cur: &mut Cursor<'_>) -> Result<Term, ParseError> {
    match cur.peek().clone() {
        Tok::Number(n) => {
            cur.next();
            Ok(Term::Numeral(n.parse().expect("lexer yields digits")))
        }
        Tok::Ident(_) => {
            let name = cur.ident(&[])?;
            let mut args = Vec::new();
            if cur.eat_sym('(') {
                if !cur.at_sym(')') {
                    loop {
                        args.push(term(cur)?);
                        if !cur.eat_sym(',') {
                            break;
                        }
                    }
                }
                cur.expect_sym(')')?;
            }
            Ok(Term::Ctor(name, args))
        }
        _ => Err(cur.unexpected(&["constructor", "numeral"])),
    }
}

pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut cur = Cursor::new(src, "<term>")?;
    let t = term(&mut cur)?;
    if *cur.peek() != Tok::Eof {
        return Err(cur.unexpected(&["end of term"]));
    }
    Ok(t)
}
