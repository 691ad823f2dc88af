use crate::events::Event;
use crate::multiagent::InteractiveModel;
use crate::rational::Rational;

use super::cursor::Cursor;
use super::model::ModelDoc;
use super::{DslError, DslResult, ErrorKind};

/// Operator expression with names resolved against a document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Set(Event),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    K(usize, Box<Expr>),
    B(usize, Rational, Box<Expr>),
    C(Box<Expr>),
    Cp(Rational, Box<Expr>),
}

impl Expr {
    /// Text that parses back to the same expression.
    pub fn render(&self, im: &InteractiveModel) -> String {
        let space = im.sigma().space();
        match self {
            Expr::Set(e) => format!("{{{}}}", space.event_names(*e).join(" ")),
            Expr::Not(a) => format!("~{}", a.render_tight(im)),
            Expr::And(a, b) => format!("{} & {}", a.render_tight(im), b.render_tight(im)),
            Expr::Or(a, b) => format!("{} | {}", a.render_tight(im), b.render_tight(im)),
            Expr::K(i, a) => format!("K[{}]({})", im.agent(*i).name(), a.render(im)),
            Expr::B(i, p, a) => format!("B[{},{}]({})", im.agent(*i).name(), p, a.render(im)),
            Expr::C(a) => format!("C({})", a.render(im)),
            Expr::Cp(p, a) => format!("Cp[{}]({})", p, a.render(im)),
        }
    }

    fn render_tight(&self, im: &InteractiveModel) -> String {
        match self {
            Expr::And(..) | Expr::Or(..) => format!("({})", self.render(im)),
            _ => self.render(im),
        }
    }
}

struct Parser<'a, 'd> {
    c: Cursor<'a>,
    doc: &'d ModelDoc,
}

impl Parser<'_, '_> {
    fn or(&mut self) -> DslResult<Expr> {
        let mut lhs = self.and()?;
        while self.c.eat('|') {
            lhs = Expr::Or(Box::new(lhs), Box::new(self.and()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> DslResult<Expr> {
        let mut lhs = self.unary()?;
        while self.c.eat('&') {
            lhs = Expr::And(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> DslResult<Expr> {
        if self.c.eat('~') {
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn paren(&mut self) -> DslResult<Expr> {
        self.c.expect('(')?;
        let e = self.or()?;
        self.c.expect(')')?;
        Ok(e)
    }

    fn threshold(&mut self) -> DslResult<Rational> {
        let p = self.c.rational()?;
        if !p.v.is_unit_interval() {
            return Err(p.err(ErrorKind::RationalOutOfRange, format!("threshold {} lies outside [0,1]", p.v)));
        }
        Ok(p.v)
    }

    fn agent(&mut self) -> DslResult<usize> {
        let name = self.c.ident()?;
        self.doc
            .model
            .agent_index(&name.v)
            .ok_or_else(|| name.err(ErrorKind::UnknownAgent, format!("unknown agent `{}`", name.v)))
    }

    fn sole_agent(&self, line: usize, col: usize) -> DslResult<usize> {
        if self.doc.model.n_agents() == 1 {
            Ok(0)
        } else {
            Err(DslError::new(line, col, ErrorKind::UnknownAgent, "name the agent: `K[agent](…)`"))
        }
    }

    fn atom(&mut self) -> DslResult<Expr> {
        match self.c.peek() {
            Some('(') => return self.paren(),
            Some('{') => {
                let set = self.c.set()?;
                let sigma = self.doc.model.sigma();
                let mut e = Event::EMPTY;
                for s in &set.v {
                    let i = sigma
                        .space()
                        .index_of(&s.v)
                        .ok_or_else(|| s.err(ErrorKind::UnknownState, format!("unknown state `{}`", s.v)))?;
                    e = e.union(Event::singleton(i));
                }
                if !sigma.is_measurable(e) {
                    return Err(set.err(
                        ErrorKind::Invariant,
                        format!("{} is not an event of the sigma-algebra", sigma.format_event(e)),
                    ));
                }
                return Ok(Expr::Set(e));
            }
            _ => {}
        }
        let name = self.c.ident()?;
        let op = match name.v.as_str() {
            "K" | "C" => matches!(self.c.peek(), Some('[' | '(')),
            "B" | "Cp" => self.c.peek() == Some('['),
            _ => false,
        };
        if !op {
            return match name.v.as_str() {
                "Omega" => Ok(Expr::Set(self.doc.model.full())),
                "empty" => Ok(Expr::Set(Event::EMPTY)),
                n => self
                    .doc
                    .event(n)
                    .map(Expr::Set)
                    .ok_or_else(|| name.err(ErrorKind::UnknownEvent, format!("unknown event `{n}`"))),
            };
        }
        let bracket = self.c.eat('[');
        let e = match name.v.as_str() {
            "K" => {
                let i = if bracket { self.agent()? } else { self.sole_agent(name.line, name.col)? };
                if bracket {
                    self.c.expect(']')?;
                }
                Expr::K(i, Box::new(self.paren()?))
            }
            "B" => {
                if !bracket {
                    return Err(self.c.error(ErrorKind::Syntax, "expected `[` with a threshold"));
                }
                let i = if self.c.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.sole_agent(name.line, name.col)?
                } else {
                    let i = self.agent()?;
                    self.c.expect(',')?;
                    i
                };
                let p = self.threshold()?;
                self.c.expect(']')?;
                Expr::B(i, p, Box::new(self.paren()?))
            }
            _ => {
                if bracket {
                    let p = self.threshold()?;
                    self.c.expect(']')?;
                    Expr::Cp(p, Box::new(self.paren()?))
                } else {
                    Expr::C(Box::new(self.paren()?))
                }
            }
        };
        Ok(e)
    }
}

/// Parses `K[i](E) & ~B[j,1/2]({s1 s2}) | Cp[2/3](E)`; `C[p]` is an alias
/// for `Cp[p]`. Names resolve against the document's declarations;
/// `Omega` and `empty` are built in.
pub fn parse_expr(doc: &ModelDoc, text: &str) -> DslResult<Expr> {
    let mut p = Parser {
        c: Cursor::new(text, 1),
        doc,
    };
    let e = p.or()?;
    p.c.expect_end()?;
    Ok(e)
}

pub fn eval_expr(im: &InteractiveModel, e: &Expr) -> Event {
    match e {
        Expr::Set(s) => *s,
        Expr::Not(a) => im.not(eval_expr(im, a)),
        Expr::And(a, b) => eval_expr(im, a).intersection(eval_expr(im, b)),
        Expr::Or(a, b) => eval_expr(im, a).union(eval_expr(im, b)),
        Expr::K(i, a) => im.agent(*i).model().k(eval_expr(im, a)),
        Expr::B(i, p, a) => im.agent(*i).model().b(*p, eval_expr(im, a)),
        Expr::C(a) => im.common_qualitative(eval_expr(im, a)),
        Expr::Cp(p, a) => im.common_p_belief(*p, eval_expr(im, a)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dslio::{parse_model, ParseOptions};
    use crate::fixtures;
    use crate::modelgen::strategies::small_interactive_model;
    use proptest::prelude::*;

    fn w1_doc() -> ModelDoc {
        let text = "states: 1 2 3
prior: 1=1/2 2=1/4 3=1/4
agent alice:
  poss: 1 -> {1}; 2 -> {2 3}; 3 -> {2 3}
  type: bayes
event E = {2 3}
";
        parse_model(text, ParseOptions::default()).unwrap()
    }

    fn eval(doc: &ModelDoc, text: &str) -> Event {
        eval_expr(&doc.model, &parse_expr(doc, text).unwrap())
    }

    #[test]
    fn w1_beliefs() {
        let doc = w1_doc();
        let s = |v: &[usize]| Event::from_states(v.iter().copied());
        assert_eq!(eval(&doc, "B[alice,1/2]({1 2})"), s(&[0, 1, 2]));
        assert_eq!(eval(&doc, "B[1](E)"), s(&[1, 2]));
        assert_eq!(eval(&doc, "K(E) & ~{3}"), s(&[1]));
        assert_eq!(eval(&doc, "~{1} | {1} & empty"), s(&[1, 2]));
        assert_eq!(eval(&doc, "C[1](Omega)"), s(&[0, 1, 2]));
        assert_eq!(eval(&doc, "K[alice](E)"), s(&[1, 2]));
        assert_eq!(eval(&doc, "~B[alice,1/2](E) & Cp[1](E)"), Event::EMPTY);
        assert_eq!(eval(&doc, "Cp[1](E)"), s(&[1, 2]));
    }

    #[test]
    fn precedence_and_errors() {
        let doc = w1_doc();
        assert_eq!(
            parse_expr(&doc, "~E & E | E").unwrap(),
            parse_expr(&doc, "((~E) & E) | E").unwrap()
        );
        let e = parse_expr(&doc, "B[alice,3/2](E)").unwrap_err();
        assert_eq!((e.kind, e.col), (ErrorKind::RationalOutOfRange, 9));
        assert_eq!(parse_expr(&doc, "K[bob](E)").unwrap_err().kind, ErrorKind::UnknownAgent);
        assert_eq!(parse_expr(&doc, "F").unwrap_err().kind, ErrorKind::UnknownEvent);
        assert_eq!(parse_expr(&doc, "{4}").unwrap_err().kind, ErrorKind::UnknownState);
        assert_eq!(parse_expr(&doc, "E &").unwrap_err().kind, ErrorKind::Syntax);
        assert_eq!(parse_expr(&doc, "(E").unwrap_err().kind, ErrorKind::Syntax);
    }

    #[test]
    fn agents_must_be_named_when_several() {
        let doc = ModelDoc::new(fixtures::iw1());
        assert_eq!(parse_expr(&doc, "K({1})").unwrap_err().kind, ErrorKind::UnknownAgent);
        assert!(parse_expr(&doc, "K[bob]({1 2})").is_ok());
    }

    fn arb_expr(im: &InteractiveModel) -> impl Strategy<Value = Expr> {
        let events = im.events();
        let n_agents = im.n_agents();
        let mut ps = im.critical_thresholds();
        ps.push(Rational::new(1, 3));
        let leaf = prop::sample::select(events).prop_map(Expr::Set);
        leaf.prop_recursive(4, 24, 2, move |inner| {
            let ps2 = ps.clone();
            prop_oneof![
                inner.clone().prop_map(|a| Expr::Not(Box::new(a))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::And(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Or(Box::new(a), Box::new(b))),
                (0..n_agents, inner.clone()).prop_map(|(i, a)| Expr::K(i, Box::new(a))),
                (0..n_agents, prop::sample::select(ps.clone()), inner.clone())
                    .prop_map(|(i, p, a)| Expr::B(i, p, Box::new(a))),
                inner.clone().prop_map(|a| Expr::C(Box::new(a))),
                (prop::sample::select(ps2), inner).prop_map(|(p, a)| Expr::Cp(p, Box::new(a))),
            ]
        })
    }

    /// Direct set-level evaluation, independent of the evaluator's dispatch.
    fn reference(im: &InteractiveModel, e: &Expr) -> Event {
        let n = im.n_states();
        let all = Event::full(n);
        match e {
            Expr::Set(s) => *s,
            Expr::Not(a) => all.difference(reference(im, a)),
            Expr::And(a, b) => reference(im, a).intersection(reference(im, b)),
            Expr::Or(a, b) => reference(im, a).union(reference(im, b)),
            Expr::K(i, a) => {
                let x = reference(im, a);
                let m = im.agent(*i).model();
                Event::from_states((0..n).filter(|&w| m.poss().cell(w).is_subset(x)))
            }
            Expr::B(i, p, a) => {
                let x = reference(im, a);
                let m = im.agent(*i).model();
                Event::from_states((0..n).filter(|&w| m.types().t(w, x) >= *p))
            }
            Expr::C(a) => im.common_qualitative_iterative(reference(im, a)),
            Expr::Cp(p, a) => {
                let x = reference(im, a);
                let mut cur = x;
                let mut acc = all;
                for _ in 0..=(1usize << n) {
                    cur = im.mutual_p_belief(*p, cur);
                    acc = acc.intersection(cur);
                }
                acc
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn evaluator_matches_reference((im, e) in small_interactive_model().prop_flat_map(|im| {
            let s = arb_expr(&im);
            (Just(im), s)
        })) {
            prop_assert_eq!(eval_expr(&im, &e), reference(&im, &e));
            let doc = ModelDoc::new(im.clone());
            let back = parse_expr(&doc, &e.render(&im)).unwrap();
            prop_assert_eq!(eval_expr(&im, &back), eval_expr(&im, &e));
        }
    }
}
