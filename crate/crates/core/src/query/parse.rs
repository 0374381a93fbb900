use super::{MelodyLiteral, QueryAst, QueryError, Term, TermRef};
use crate::melody::Notation;
use crate::textindex::{normalize_term, BoolOp, TextField};

/// Parses a query string. A bare `or` (any case) is always the operator;
/// to search for the word itself put a field tag in front of it.
pub fn parse(text: &str) -> Result<QueryAst, QueryError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut ast = QueryAst::default();
    let mut op: Option<(BoolOp, usize)> = None;
    let mut field: Option<(TextField, usize)> = None;
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '!' {
            if let Some(p) = pending(op, field) {
                return Err(QueryError::DanglingOperator(p));
            }
            op = Some((BoolOp::Not, pos));
            i += 1;
        } else if c == '[' {
            let close = chars[i + 1..]
                .iter()
                .position(|&(_, c)| c == ']' || c == '[')
                .map(|k| i + 1 + k)
                .filter(|&k| chars[k].1 == ']')
                .ok_or(QueryError::MalformedBracket(pos))?;
            let inner: String = chars[i + 1..close].iter().map(|&(_, c)| c).collect();
            i = close + 1;
            if let Some((name, body)) = inner.split_once(':') {
                if let Some(p) = pending(op, field) {
                    return Err(QueryError::DanglingOperator(p));
                }
                ast.melodies.push(melody(name, body)?);
            } else {
                if let Some((_, p)) = field {
                    return Err(QueryError::DanglingOperator(p));
                }
                field = Some((field_tag(&inner, pos)?, pos));
            }
        } else if c.is_alphanumeric() {
            let end = chars[i..]
                .iter()
                .position(|&(_, c)| !c.is_alphanumeric())
                .map_or(chars.len(), |k| i + k);
            let word: String = chars[i..end].iter().map(|&(_, c)| c).collect();
            i = end;
            if field.is_none() && word.eq_ignore_ascii_case("or") {
                if let Some((_, p)) = op {
                    return Err(QueryError::DanglingOperator(p));
                }
                if !ast.melodies.is_empty() {
                    return Err(QueryError::MelodyBeforeTerm(word));
                }
                if ast.terms.is_empty() {
                    return Err(QueryError::LeadingOr);
                }
                op = Some((BoolOp::Or, pos));
                continue;
            }
            if !ast.melodies.is_empty() {
                return Err(QueryError::MelodyBeforeTerm(word));
            }
            let norm = normalize_term(&word).ok_or(QueryError::BadChar(c, pos))?;
            ast.terms.push(Term {
                op: op.take().map_or(BoolOp::And, |(o, _)| o),
                term: TermRef {
                    field: field.take().map(|(f, _)| f),
                    word: norm,
                },
            });
        } else if c == ']' {
            return Err(QueryError::MalformedBracket(pos));
        } else {
            return Err(QueryError::BadChar(c, pos));
        }
    }
    if let Some(p) = pending(op, field) {
        return Err(QueryError::DanglingOperator(p));
    }
    if ast.terms.is_empty() && ast.melodies.is_empty() {
        return Err(QueryError::Empty);
    }
    Ok(ast)
}

fn pending(op: Option<(BoolOp, usize)>, field: Option<(TextField, usize)>) -> Option<usize> {
    op.map(|(_, p)| p).or(field.map(|(_, p)| p))
}

fn field_tag(inner: &str, pos: usize) -> Result<TextField, QueryError> {
    let tag = inner.trim();
    if tag.is_empty() {
        return Err(QueryError::MalformedBracket(pos));
    }
    match tag.to_ascii_uppercase().as_str() {
        "TITLE" => Ok(TextField::Title),
        "ARTIST" => Ok(TextField::Artist),
        "LYRICS" => Ok(TextField::Lyrics),
        "ALBUM" => Ok(TextField::Album),
        _ => Err(QueryError::UnknownField(tag.to_string())),
    }
}

fn melody(name: &str, body: &str) -> Result<MelodyLiteral, QueryError> {
    let notation: Notation = name
        .trim()
        .parse()
        .map_err(|_| QueryError::UnknownNotation(name.trim().to_string()))?;
    let tokens = notation
        .parse_symbols(body)
        .map_err(|e| QueryError::BadMelody(notation, e.to_string()))?;
    if tokens.is_empty() {
        return Err(QueryError::BadMelody(notation, "no tokens".into()));
    }
    Ok(MelodyLiteral { notation, tokens })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn term(op: BoolOp, field: Option<TextField>, word: &str) -> Term {
        Term {
            op,
            term: TermRef {
                field,
                word: word.into(),
            },
        }
    }

    #[test]
    fn album_query_ast() {
        let ast = parse("[ALBUM]Californication").unwrap();
        assert_eq!(ast.terms, [term(BoolOp::And, Some(TextField::Album), "californication")]);
        assert!(ast.melodies.is_empty());
        assert_eq!(ast.render(), "[ALBUM]californication");
    }

    #[test]
    fn single_word() {
        assert_eq!(parse("joy").unwrap().terms, [term(BoolOp::And, None, "joy")]);
    }

    #[test]
    fn operators_fields_and_melody() {
        let ast = parse("beethoven or mozart ![LYRICS]love [PIT:*0+-+]").unwrap();
        assert_eq!(
            ast.terms,
            [
                term(BoolOp::And, None, "beethoven"),
                term(BoolOp::Or, None, "mozart"),
                term(BoolOp::Not, Some(TextField::Lyrics), "love"),
            ]
        );
        assert_eq!(ast.melodies.len(), 1);
        assert_eq!(ast.melodies[0].notation, Notation::Pit);
        assert_eq!(ast.melodies[0].to_string(), "[PIT:*0+-+]");
    }

    #[test]
    fn case_insensitive_tags_and_folding() {
        let ast = parse("[album] Łódź OR [Title]Or [bth:(*,*) (+,0)]").unwrap();
        assert_eq!(
            ast.terms,
            [
                term(BoolOp::And, Some(TextField::Album), "lodz"),
                term(BoolOp::Or, Some(TextField::Title), "or"),
            ]
        );
        assert_eq!(ast.melodies[0].to_string(), "[BTH:(*,*)(+,0)]");
    }

    #[test]
    fn distinct_errors() {
        assert_eq!(parse(""), Err(QueryError::Empty));
        assert_eq!(parse("   "), Err(QueryError::Empty));
        assert_eq!(parse("[GENRE]rock"), Err(QueryError::UnknownField("GENRE".into())));
        assert_eq!(parse("[PIT:*+] joy"), Err(QueryError::MelodyBeforeTerm("joy".into())));
        assert_eq!(parse("[TITLE joy"), Err(QueryError::MalformedBracket(0)));
        assert_eq!(parse("joy ]"), Err(QueryError::MalformedBracket(4)));
        assert_eq!(parse("[]joy"), Err(QueryError::MalformedBracket(0)));
        assert_eq!(parse("[TI[TLE]joy"), Err(QueryError::MalformedBracket(0)));
        assert_eq!(parse("joy !"), Err(QueryError::DanglingOperator(4)));
        assert_eq!(parse("joy [TITLE]"), Err(QueryError::DanglingOperator(4)));
        assert_eq!(parse("joy or or x"), Err(QueryError::DanglingOperator(4)));
        assert_eq!(parse("or joy"), Err(QueryError::LeadingOr));
        assert_eq!(parse("rock-roll"), Err(QueryError::BadChar('-', 4)));
        assert_eq!(parse("a [XYZ:+-]"), Err(QueryError::UnknownNotation("XYZ".into())));
        assert!(matches!(parse("a [PIT:+x]"), Err(QueryError::BadMelody(Notation::Pit, _))));
        assert!(matches!(parse("a [PIT:]"), Err(QueryError::BadMelody(Notation::Pit, _))));
        assert!(matches!(parse("a [BTH:*+]"), Err(QueryError::BadMelody(Notation::Bth, _))));
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let ops = prop_oneof![Just(BoolOp::And), Just(BoolOp::Or), Just(BoolOp::Not)];
        let fields = prop_oneof![
            Just(None),
            Just(Some(TextField::Title)),
            Just(Some(TextField::Artist)),
            Just(Some(TextField::Lyrics)),
            Just(Some(TextField::Album)),
        ];
        (ops, fields, "[a-z0-9]{1,6}").prop_map(|(op, field, word)| {
            // a bare "or" is the operator, so give it a field
            let field = if word == "or" { Some(TextField::Title) } else { field };
            term(op, field, &word)
        })
    }

    fn arb_melody() -> impl Strategy<Value = MelodyLiteral> {
        let n = prop_oneof![Just(Notation::Pit), Just(Notation::Ioi), Just(Notation::Bth)];
        (n, "[*+0-]{1,8}").prop_map(|(notation, s)| {
            let text = match notation {
                Notation::Bth => s.chars().map(|c| format!("({c},{c})")).collect(),
                _ => s,
            };
            melody(notation.name(), &text).unwrap()
        })
    }

    proptest! {
        #[test]
        fn render_round_trip(
            mut terms in prop::collection::vec(arb_term(), 0..6),
            melodies in prop::collection::vec(arb_melody(), 0..3),
        ) {
            if let Some(first) = terms.first_mut() {
                if first.op == BoolOp::Or {
                    first.op = BoolOp::And;
                }
            }
            prop_assume!(!terms.is_empty() || !melodies.is_empty());
            let ast = QueryAst { terms, melodies };
            prop_assert_eq!(parse(&ast.render()).unwrap(), ast);
        }
    }
}
