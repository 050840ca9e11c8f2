//! Recursive-descent parser.
//!
//! ```text
//! query       := matchPart (withPart matchPart?)* returnClause orderBy? limit?
//! matchPart   := ("MATCH" patternList ("WHERE" expr)?)+
//! withPart    := "WITH" items ("UNWIND" expr "AS" ident)?
//! pattern     := (ident "=")? (chain | "(" chain ")" | "shortestPath" "(" chain ")")
//! chain       := nodePat (relPat nodePat)*
//! nodePat     := "(" ident? (":" label)? propMap? ")"
//! relPat      := ("-"|"<-") "[" ident? (":" label)? range? propMap? "]" ("-"|"->")
//! range       := "*" int? (".." int?)?
//! expr        := comparison ("AND" comparison)*
//! comparison  := operand (("="|"<"|">"|"<="|">=") operand | "=~" string)?
//! operand     := literal | ident | ident "." ident | call | "(" expr ")"
//! ```

use litgraph_core::{EdgeLabel, NodeLabel};

use crate::ast::*;
use crate::error::ParseError;
use crate::lexer::{tokenize, Token, TokenKind};

pub fn parse(text: &str) -> Result<Query, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, end: text.len() };
    p.query()
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, n: usize) -> Option<&TokenKind> {
        self.tokens.get(self.pos + n).map(|t| &t.kind)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.offset)
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek() == Some(kind)
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let found = match self.peek() {
            Some(k) => k.to_string(),
            None => "end of input".to_owned(),
        };
        let message = match expected {
            [] => format!("unexpected {found}"),
            [one] => format!("expected {one}, found {found}"),
            many => format!("expected one of {}, found {found}", many.join(", ")),
        };
        ParseError { offset: self.offset(), message, expected: expected.iter().map(|s| s.to_string()).collect() }
    }

    fn error_at(&self, offset: usize, message: impl Into<String>) -> ParseError {
        ParseError { offset, message: message.into(), expected: Vec::new() }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<()> {
        if self.eat(&kind) {
            Ok(())
        } else {
            Err(self.error(&[&kind.to_string()]))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(TokenKind::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    fn is_ident(&self, n: usize, word: &str) -> bool {
        matches!(self.peek_at(n), Some(TokenKind::Ident(w)) if w.eq_ignore_ascii_case(word))
    }

    fn query(&mut self) -> PResult<Query> {
        let mut clauses = Vec::new();
        if !self.at(&TokenKind::Match) {
            return Err(self.error(&["MATCH"]));
        }
        loop {
            while self.eat(&TokenKind::Match) {
                clauses.push(Clause::Match(self.match_clause()?));
            }
            if self.eat(&TokenKind::With) {
                clauses.push(Clause::With(self.projection()?));
                if self.eat(&TokenKind::Unwind) {
                    let expr = self.expr()?;
                    self.expect(TokenKind::As)?;
                    let variable = self.ident()?;
                    clauses.push(Clause::Unwind(Unwind { expr, variable }));
                }
                continue;
            }
            break;
        }
        if !self.eat(&TokenKind::Return) {
            return Err(self.error(&["MATCH", "WITH", "RETURN"]));
        }
        clauses.push(Clause::Return(self.projection()?));

        let mut order_by = None;
        if self.eat(&TokenKind::Order) {
            self.expect(TokenKind::By)?;
            let expr = self.expr()?;
            let descending = if self.eat(&TokenKind::Desc) {
                true
            } else {
                self.eat(&TokenKind::Asc);
                false
            };
            order_by = Some(OrderBy { expr, descending });
        }
        let mut limit = None;
        if self.eat(&TokenKind::Limit) {
            match self.peek() {
                Some(TokenKind::Int(n)) => {
                    limit = Some(*n as u64);
                    self.pos += 1;
                }
                _ => return Err(self.error(&["integer"])),
            }
        }
        if self.peek().is_some() {
            let mut expected = Vec::new();
            if order_by.is_none() && limit.is_none() {
                expected.push("ORDER");
            }
            if limit.is_none() {
                expected.push("LIMIT");
            }
            expected.push("end of input");
            return Err(self.error(&expected));
        }
        Ok(Query { clauses, order_by, limit })
    }

    fn match_clause(&mut self) -> PResult<MatchClause> {
        let mut patterns = vec![self.pattern()?];
        while self.eat(&TokenKind::Comma) {
            patterns.push(self.pattern()?);
        }
        let predicate = if self.eat(&TokenKind::Where) { Some(self.expr()?) } else { None };
        Ok(MatchClause { patterns, predicate })
    }

    fn pattern(&mut self) -> PResult<Pattern> {
        let mut variable = None;
        if matches!(self.peek(), Some(TokenKind::Ident(_))) && self.peek_at(1) == Some(&TokenKind::Eq) {
            variable = Some(self.ident()?);
            self.pos += 1;
        }
        if self.is_ident(0, "shortestPath") && self.peek_at(1) == Some(&TokenKind::LParen) {
            let start = self.offset();
            self.pos += 2;
            let chain = self.chain()?;
            self.expect(TokenKind::RParen)?;
            if chain.steps.len() != 1 {
                return Err(self.error_at(start, "shortestPath needs exactly one relationship between two nodes"));
            }
            return Ok(Pattern { variable, shortest: true, chain });
        }
        if self.at(&TokenKind::LParen) && self.peek_at(1) == Some(&TokenKind::LParen) {
            self.pos += 1;
            let chain = self.chain()?;
            self.expect(TokenKind::RParen)?;
            return Ok(Pattern { variable, shortest: false, chain });
        }
        let chain = self.chain()?;
        Ok(Pattern { variable, shortest: false, chain })
    }

    fn chain(&mut self) -> PResult<Chain> {
        let start = self.node_pattern()?;
        let mut steps = Vec::new();
        while matches!(self.peek(), Some(TokenKind::Dash | TokenKind::ArrowLeft)) {
            let rel = self.rel_pattern()?;
            let node = self.node_pattern()?;
            steps.push((rel, node));
        }
        Ok(Chain { start, steps })
    }

    fn node_pattern(&mut self) -> PResult<NodePattern> {
        self.expect(TokenKind::LParen)?;
        let variable = if matches!(self.peek(), Some(TokenKind::Ident(_))) { Some(self.ident()?) } else { None };
        let mut label = None;
        if self.eat(&TokenKind::Colon) {
            let at = self.offset();
            let name = self.ident()?;
            label = Some(name.parse::<NodeLabel>().map_err(|_| {
                let mut e = self.error_at(at, format!("unknown node label `{name}`"));
                e.expected = NodeLabel::ALL.iter().map(|l| l.to_string()).collect();
                e
            })?);
        }
        let properties = if self.at(&TokenKind::LBrace) { self.prop_map()? } else { Vec::new() };
        if !self.eat(&TokenKind::RParen) {
            let mut expected = Vec::new();
            if label.is_none() && properties.is_empty() {
                if variable.is_none() {
                    expected.push("identifier");
                }
                expected.push("`:`");
            }
            if properties.is_empty() {
                expected.push("`{`");
            }
            expected.push("`)`");
            return Err(self.error(&expected));
        }
        Ok(NodePattern { variable, label, properties })
    }

    fn rel_pattern(&mut self) -> PResult<RelPattern> {
        let start = self.offset();
        let incoming = if self.eat(&TokenKind::ArrowLeft) {
            true
        } else {
            self.expect(TokenKind::Dash)?;
            false
        };
        self.expect(TokenKind::LBracket)?;
        let variable = if matches!(self.peek(), Some(TokenKind::Ident(_))) { Some(self.ident()?) } else { None };
        let mut label = None;
        if self.eat(&TokenKind::Colon) {
            let at = self.offset();
            let name = self.ident()?;
            label = Some(name.parse::<EdgeLabel>().map_err(|_| {
                let mut e = self.error_at(at, format!("unknown relationship type `{name}`"));
                e.expected = EdgeLabel::ALL.iter().map(|l| l.to_string()).collect();
                e
            })?);
        }
        let mut range = None;
        if self.at(&TokenKind::Star) {
            let at = self.offset();
            self.pos += 1;
            let min = self.opt_u32()?;
            let (min, max) = if self.eat(&TokenKind::DotDot) { (min, self.opt_u32()?) } else { (min, min) };
            if let (Some(lo), Some(hi)) = (min, max) {
                if lo > hi {
                    return Err(self.error_at(at, format!("hop range {lo}..{hi} has min greater than max")));
                }
            }
            range = Some(HopRange { min, max });
        }
        let properties = if self.at(&TokenKind::LBrace) { self.prop_map()? } else { Vec::new() };
        self.expect(TokenKind::RBracket)?;
        let outgoing = if self.eat(&TokenKind::ArrowRight) {
            true
        } else if self.eat(&TokenKind::Dash) {
            false
        } else {
            return Err(self.error(&["`-`", "`->`"]));
        };
        let direction = match (incoming, outgoing) {
            (false, true) => RelDirection::Outgoing,
            (true, false) => RelDirection::Incoming,
            (false, false) => RelDirection::Undirected,
            (true, true) => return Err(self.error_at(start, "relationship cannot point both ways")),
        };
        Ok(RelPattern { variable, label, direction, range, properties })
    }

    fn opt_u32(&mut self) -> PResult<Option<u32>> {
        match self.peek() {
            Some(TokenKind::Int(n)) => {
                let n = u32::try_from(*n).map_err(|_| self.error_at(self.offset(), "hop count out of range"))?;
                self.pos += 1;
                Ok(Some(n))
            }
            _ => Ok(None),
        }
    }

    fn prop_map(&mut self) -> PResult<Vec<(String, Literal)>> {
        self.expect(TokenKind::LBrace)?;
        let mut props = Vec::new();
        loop {
            let key = self.ident()?;
            self.expect(TokenKind::Colon)?;
            let value = self.literal()?;
            props.push((key, value));
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        self.expect(TokenKind::RBrace)?;
        Ok(props)
    }

    fn literal(&mut self) -> PResult<Literal> {
        match self.peek().cloned() {
            Some(TokenKind::Str(s)) => {
                self.pos += 1;
                Ok(Literal::Text(s))
            }
            Some(TokenKind::Int(i)) => {
                self.pos += 1;
                Ok(Literal::Integer(i))
            }
            Some(TokenKind::Dash) => match self.peek_at(1) {
                Some(TokenKind::Int(i)) => {
                    let i = -*i;
                    self.pos += 2;
                    Ok(Literal::Integer(i))
                }
                _ => {
                    self.pos += 1;
                    Err(self.error(&["integer"]))
                }
            },
            _ => Err(self.error(&["string literal", "integer"])),
        }
    }

    fn items_end(&self) -> bool {
        !self.at(&TokenKind::Comma)
    }

    fn projection(&mut self) -> PResult<Projection> {
        let mut items = Vec::new();
        loop {
            let expr = self.expr()?;
            let alias = if self.eat(&TokenKind::As) { Some(self.ident()?) } else { None };
            items.push(ProjectionItem { expr, alias });
            if self.items_end() {
                break;
            }
            self.pos += 1;
        }
        Ok(Projection { items })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let first = self.comparison()?;
        if !self.at(&TokenKind::And) {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.eat(&TokenKind::And) {
            parts.push(self.comparison()?);
        }
        Ok(Expr::And(parts))
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let lhs = self.operand()?;
        let op = match self.peek() {
            Some(TokenKind::Eq) => CompareOp::Eq,
            Some(TokenKind::Lt) => CompareOp::Lt,
            Some(TokenKind::Gt) => CompareOp::Gt,
            Some(TokenKind::Le) => CompareOp::Le,
            Some(TokenKind::Ge) => CompareOp::Ge,
            Some(TokenKind::RegexMatch) => {
                self.pos += 1;
                return match self.peek().cloned() {
                    Some(TokenKind::Str(pattern)) => {
                        self.pos += 1;
                        Ok(Expr::Regex { lhs: Box::new(lhs), pattern })
                    }
                    _ => Err(self.error(&["string literal"])),
                };
            }
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.operand()?;
        Ok(Expr::Compare { op, lhs: Box::new(lhs), rhs: Box::new(rhs) })
    }

    fn operand(&mut self) -> PResult<Expr> {
        match self.peek().cloned() {
            Some(TokenKind::Str(_) | TokenKind::Int(_) | TokenKind::Dash) => Ok(Expr::Literal(self.literal()?)),
            Some(TokenKind::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(inner)
            }
            Some(TokenKind::Ident(name)) => {
                let at = self.offset();
                self.pos += 1;
                if self.eat(&TokenKind::LParen) {
                    let call = if name.eq_ignore_ascii_case("count") {
                        if self.eat(&TokenKind::Star) {
                            Expr::Count(None)
                        } else {
                            Expr::Count(Some(Box::new(self.expr()?)))
                        }
                    } else if name.eq_ignore_ascii_case("nodes") {
                        Expr::Nodes(Box::new(self.expr()?))
                    } else {
                        let mut e = self.error_at(at, format!("unknown function `{name}`"));
                        e.expected = vec!["count".into(), "nodes".into()];
                        return Err(e);
                    };
                    self.expect(TokenKind::RParen)?;
                    return Ok(call);
                }
                if self.eat(&TokenKind::Dot) {
                    let key = self.ident()?;
                    return Ok(Expr::Property { variable: name, key });
                }
                Ok(Expr::Variable(name))
            }
            _ => Err(self.error(&["expression"])),
        }
    }
}
