//! Recursive-descent parser for the knowledge-base DSL.
//!
//! ```text
//! kb        = { template | primitive | reaction } ;
//! template  = "activity" VERB "{" [ "when" cond ] "subtasks" "{" { subtask } "}" "}" ;
//! subtask   = VERB "(" actor [ "," objective ] ")" [ "after" NAME | "with" NAME ]
//!             [ "dur" INT "min" ] [ "fn" FUNC ] "as" NAME ";" ;
//! actor     = "self" | "passed_unit" | "nearest_of" "(" KIND "," SIDE ")" ;
//! objective = "inherit" | "anchor" | "measure" STRING ;
//! primitive = "primitive" VERB "dur" INT "min" "fn" FUNC [ "engages" ] { option } ";" ;
//! option    = "moves" | "by" KIND | "fuel" NUM | "ammo" NUM | "kill" NUM | "return" NUM ;
//! reaction  = "reaction" "on" VERB "by" "enemy" KIND "within" NUM "km"
//!             "do" VERB [ "counter" VERB { "," VERB } ] ";" ;
//! cond      = atom { "and" atom } ;
//! atom      = "exists_unit" "(" SIDE "," KIND "," "within" NUM "km" ")"
//!           | "actor_has_supply" "(" ( "fuel" | "ammo" ) "," NUM ")"
//!           | "terrain_at" "(" "anchor" "," TERRAIN ")" ;
//! ```

use std::collections::HashMap;

use super::lexer::{tokenize, Tok};
use super::*;

/// Parses and resolves a knowledge base.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, KbError> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0 };
    let mut kb = KnowledgeBase::default();
    let mut defined: HashMap<String, Span> = HashMap::new();

    loop {
        let (tok, span) = p.peek().clone();
        match tok {
            Tok::Eof => break,
            Tok::Ident(ref kw) if kw == "activity" => {
                p.advance();
                let t = p.template()?;
                if let Some(first) = defined.insert(t.verb.clone(), t.span) {
                    return Err(KbError::DuplicateDefinition {
                        span: t.span,
                        name: t.verb,
                        first,
                    });
                }
                kb.templates.insert(t.verb.clone(), t);
            }
            Tok::Ident(ref kw) if kw == "primitive" => {
                p.advance();
                let prim = p.primitive()?;
                if let Some(first) = defined.insert(prim.verb.clone(), prim.span) {
                    return Err(KbError::DuplicateDefinition {
                        span: prim.span,
                        name: prim.verb,
                        first,
                    });
                }
                kb.primitives.insert(prim.verb.clone(), prim);
            }
            Tok::Ident(ref kw) if kw == "reaction" => {
                p.advance();
                let mut rule = p.reaction()?;
                rule.id = kb.rules.len();
                kb.rules.push(rule);
            }
            _ => return Err(p.unexpected(span, "`activity`, `primitive` or `reaction`")),
        }
    }

    resolve(&kb)?;
    Ok(kb)
}

fn resolve(kb: &KnowledgeBase) -> Result<(), KbError> {
    let check = |verb: &str, span: Span| {
        if kb.defines(verb) {
            Ok(())
        } else {
            Err(KbError::UnresolvedVerb {
                span,
                verb: verb.to_string(),
            })
        }
    };
    for t in kb.templates.values() {
        let mut names: HashMap<&str, Span> = HashMap::new();
        for s in &t.subtasks {
            if let Some(first) = names.insert(&s.name, s.span) {
                return Err(KbError::DuplicateDefinition {
                    span: s.span,
                    name: s.name.clone(),
                    first,
                });
            }
        }
        for s in &t.subtasks {
            check(&s.verb, s.span)?;
            if let SubtaskOrder::After(r) | SubtaskOrder::With(r) = &s.order {
                if !names.contains_key(r.as_str()) {
                    return Err(KbError::UnresolvedName {
                        span: s.span,
                        name: r.clone(),
                    });
                }
            }
        }
        if t.subtask_order().is_none() {
            return Err(KbError::CyclicOrder {
                span: t.span,
                verb: t.verb.clone(),
            });
        }
    }
    for r in &kb.rules {
        check(&r.trigger_verb, r.span)?;
        check(&r.reaction_verb, r.span)?;
        for c in &r.counter_verbs {
            check(c, r.span)?;
        }
    }
    Ok(())
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &(Tok, Span) {
        &self.toks[self.pos]
    }

    fn advance(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, span: Span, expected: &str) -> KbError {
        KbError::Syntax {
            span,
            expected: expected.to_string(),
            found: self.toks[self.pos].0.describe(),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().0, Tok::Ident(s) if s == kw)
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.is_keyword(kw) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<Span, KbError> {
        let span = self.peek().1;
        if self.eat_keyword(kw) {
            Ok(span)
        } else {
            Err(self.unexpected(span, &format!("`{kw}`")))
        }
    }

    fn punct(&mut self, want: Tok) -> Result<Span, KbError> {
        let (tok, span) = self.peek().clone();
        if tok == want {
            self.advance();
            Ok(span)
        } else {
            Err(self.unexpected(span, &want.describe()))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Span), KbError> {
        match self.peek().clone() {
            (Tok::Ident(s), span) => {
                self.advance();
                Ok((s, span))
            }
            (_, span) => Err(self.unexpected(span, what)),
        }
    }

    fn choice<T>(&mut self, what: &str, f: impl Fn(&str) -> Option<T>) -> Result<T, KbError> {
        let (tok, span) = self.peek().clone();
        if let Tok::Ident(s) = &tok {
            if let Some(v) = f(s) {
                self.advance();
                return Ok(v);
            }
        }
        Err(self.unexpected(span, what))
    }

    fn int(&mut self) -> Result<u32, KbError> {
        let (tok, span) = self.peek().clone();
        if let Tok::Number(n) = &tok {
            if let Ok(v) = n.parse::<u32>() {
                self.advance();
                return Ok(v);
            }
        }
        Err(self.unexpected(span, "integer"))
    }

    fn num(&mut self) -> Result<f64, KbError> {
        let (tok, span) = self.peek().clone();
        if let Tok::Number(n) = &tok {
            if let Ok(v) = n.parse::<f64>() {
                if v.is_finite() {
                    self.advance();
                    return Ok(v);
                }
            }
        }
        Err(self.unexpected(span, "number"))
    }

    fn positive_num(&mut self) -> Result<f64, KbError> {
        let span = self.peek().1;
        let v = self.num()?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(KbError::Syntax {
                span,
                expected: "positive number".into(),
                found: format!("number {v}"),
            })
        }
    }

    fn side(&mut self) -> Result<SideRef, KbError> {
        self.choice("`friendly` or `enemy`", |s| match s {
            "friendly" => Some(SideRef::Friendly),
            "enemy" => Some(SideRef::Enemy),
            _ => None,
        })
    }

    fn kind(&mut self) -> Result<UnitKind, KbError> {
        self.choice("unit kind", UnitKind::parse)
    }

    fn function(&mut self) -> Result<BattlefieldFunction, KbError> {
        self.choice("battlefield function", BattlefieldFunction::parse)
    }

    fn template(&mut self) -> Result<ActivityTemplate, KbError> {
        let (verb, span) = self.ident("activity verb")?;
        self.punct(Tok::LBrace)?;
        let when = if self.eat_keyword("when") {
            Some(self.condition()?)
        } else {
            None
        };
        self.keyword("subtasks")?;
        self.punct(Tok::LBrace)?;
        let mut subtasks = Vec::new();
        while self.peek().0 != Tok::RBrace {
            subtasks.push(self.subtask()?);
        }
        self.punct(Tok::RBrace)?;
        self.punct(Tok::RBrace)?;
        if subtasks.is_empty() {
            return Err(KbError::Syntax {
                span,
                expected: "at least one subtask".into(),
                found: "empty subtask list".into(),
            });
        }
        Ok(ActivityTemplate {
            verb,
            when,
            subtasks,
            span,
        })
    }

    fn condition(&mut self) -> Result<ConditionExpr, KbError> {
        let mut atoms = vec![self.atom()?];
        while self.eat_keyword("and") {
            atoms.push(self.atom()?);
        }
        Ok(ConditionExpr { atoms })
    }

    fn atom(&mut self) -> Result<Atom, KbError> {
        let (name, span) = self.ident("condition atom")?;
        self.punct(Tok::LParen)?;
        let atom = match name.as_str() {
            "exists_unit" => {
                let side = self.side()?;
                self.punct(Tok::Comma)?;
                let kind = self.kind()?;
                self.punct(Tok::Comma)?;
                self.keyword("within")?;
                let within_km = self.num()?;
                self.keyword("km")?;
                Atom::ExistsUnit {
                    side,
                    kind,
                    within_km,
                }
            }
            "actor_has_supply" => {
                let resource = self.choice("`fuel` or `ammo`", |s| match s {
                    "fuel" => Some(Resource::Fuel),
                    "ammo" => Some(Resource::Ammo),
                    _ => None,
                })?;
                self.punct(Tok::Comma)?;
                let min = self.num()?;
                Atom::ActorHasSupply { resource, min }
            }
            "terrain_at" => {
                self.keyword("anchor")?;
                self.punct(Tok::Comma)?;
                let kind = self.choice("terrain kind", crate::scenario::TerrainKind::parse)?;
                Atom::TerrainAt { kind }
            }
            other => {
                return Err(KbError::Syntax {
                    span,
                    expected: "`exists_unit`, `actor_has_supply` or `terrain_at`".into(),
                    found: format!("`{other}`"),
                })
            }
        };
        self.punct(Tok::RParen)?;
        Ok(atom)
    }

    fn subtask(&mut self) -> Result<SubtaskSpec, KbError> {
        let (verb, span) = self.ident("subtask verb")?;
        self.punct(Tok::LParen)?;
        let actor_role = if self.eat_keyword("self") {
            ActorRole::SelfActor
        } else if self.eat_keyword("passed_unit") {
            ActorRole::PassedUnit
        } else if self.eat_keyword("nearest_of") {
            self.punct(Tok::LParen)?;
            let kind = self.kind()?;
            self.punct(Tok::Comma)?;
            let side = self.side()?;
            self.punct(Tok::RParen)?;
            ActorRole::NearestOf { kind, side }
        } else {
            let span = self.peek().1;
            return Err(self.unexpected(span, "`self`, `passed_unit` or `nearest_of`"));
        };
        let objective_role = if self.peek().0 == Tok::Comma {
            self.advance();
            if self.eat_keyword("inherit") {
                ObjectiveRole::Inherit
            } else if self.eat_keyword("anchor") {
                ObjectiveRole::Anchor
            } else if self.eat_keyword("measure") {
                match self.peek().clone() {
                    (Tok::Str(s), _) => {
                        self.advance();
                        ObjectiveRole::Measure(s)
                    }
                    (_, span) => return Err(self.unexpected(span, "quoted measure id")),
                }
            } else {
                let span = self.peek().1;
                return Err(self.unexpected(span, "`inherit`, `anchor` or `measure`"));
            }
        } else {
            ObjectiveRole::Inherit
        };
        self.punct(Tok::RParen)?;
        let order = if self.eat_keyword("after") {
            SubtaskOrder::After(self.ident("subtask name")?.0)
        } else if self.eat_keyword("with") {
            SubtaskOrder::With(self.ident("subtask name")?.0)
        } else {
            SubtaskOrder::Free
        };
        let duration_min = if self.eat_keyword("dur") {
            let d = self.int()?;
            self.keyword("min")?;
            Some(d)
        } else {
            None
        };
        let function = if self.eat_keyword("fn") {
            Some(self.function()?)
        } else {
            None
        };
        self.keyword("as")?;
        let (name, _) = self.ident("subtask name")?;
        self.punct(Tok::Semi)?;
        Ok(SubtaskSpec {
            name,
            verb,
            actor_role,
            objective_role,
            order,
            duration_min,
            function,
            span,
        })
    }

    fn primitive(&mut self) -> Result<Primitive, KbError> {
        let (verb, span) = self.ident("primitive verb")?;
        self.keyword("dur")?;
        let duration_min = self.int()?;
        self.keyword("min")?;
        self.keyword("fn")?;
        let function = self.function()?;
        let engages = self.eat_keyword("engages");
        let mut prim = Primitive {
            verb,
            duration_min,
            function,
            engages,
            moves: false,
            actor_kind: None,
            rates: RateTable::default(),
            kill_rate: 0.0,
            return_rate: 0.0,
            span,
        };
        let mut seen: Vec<String> = Vec::new();
        while self.peek().0 != Tok::Semi {
            let (opt, opt_span) = self.ident("primitive option or `;`")?;
            if seen.contains(&opt) {
                return Err(KbError::DuplicateDefinition {
                    span: opt_span,
                    name: opt,
                    first: span,
                });
            }
            match opt.as_str() {
                "moves" => prim.moves = true,
                "by" => prim.actor_kind = Some(self.kind()?),
                "fuel" => prim.rates.fuel_l_per_min = self.num()?,
                "ammo" => prim.rates.ammo_u_per_min = self.num()?,
                "kill" => prim.kill_rate = self.num()?,
                "return" => prim.return_rate = self.num()?,
                other => {
                    return Err(KbError::Syntax {
                        span: opt_span,
                        expected: "`moves`, `by`, `fuel`, `ammo`, `kill`, `return` or `;`".into(),
                        found: format!("`{other}`"),
                    })
                }
            }
            seen.push(opt);
        }
        self.punct(Tok::Semi)?;
        Ok(prim)
    }

    fn reaction(&mut self) -> Result<ArcRule, KbError> {
        let span = self.keyword("on")?;
        let (trigger_verb, _) = self.ident("trigger verb")?;
        self.keyword("by")?;
        // Reactions always come from the side opposing the trigger.
        self.keyword("enemy")?;
        let kind = self.kind()?;
        self.keyword("within")?;
        let within_km = self.positive_num()?;
        self.keyword("km")?;
        self.keyword("do")?;
        let (reaction_verb, _) = self.ident("reaction verb")?;
        let mut counter_verbs = Vec::new();
        if self.eat_keyword("counter") {
            counter_verbs.push(self.ident("counteraction verb")?.0);
            while self.peek().0 == Tok::Comma {
                self.advance();
                counter_verbs.push(self.ident("counteraction verb")?.0);
            }
        }
        self.punct(Tok::Semi)?;
        Ok(ArcRule {
            id: 0,
            trigger_verb,
            reactor: ReactorSpec {
                side: SideRef::Enemy,
                kind,
                within_km,
            },
            reaction_verb,
            counter_verbs,
            span,
        })
    }
}
