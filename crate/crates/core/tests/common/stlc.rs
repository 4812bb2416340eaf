//! Random well-typed source programs, printed as surface text, with a
//! direct evaluator that serves as the reference semantics.

use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ty {
    Bool,
    Nat,
    Unit,
    Arr(Box<Ty>, Box<Ty>),
    Prod(Box<Ty>, Box<Ty>),
}

impl Ty {
    pub fn arr(a: Ty, b: Ty) -> Ty {
        Ty::Arr(Box::new(a), Box::new(b))
    }

    pub fn prod(a: Ty, b: Ty) -> Ty {
        Ty::Prod(Box::new(a), Box::new(b))
    }

    pub fn surface(&self) -> String {
        match self {
            Ty::Bool => "bool".into(),
            Ty::Nat => "nat".into(),
            Ty::Unit => "unit".into(),
            Ty::Arr(a, b) => format!("(arr {} {})", a.surface(), b.surface()),
            Ty::Prod(a, b) => format!("(prod {} {})", a.surface(), b.surface()),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Val {
    /// De Bruijn index; 0 is the innermost binder.
    Var(usize),
    True,
    False,
    Num(u32),
    Tt,
    Lam(Box<Fun>),
    Pair(Box<Val>, Box<Val>),
    /// Recursive function: the body sees itself at index 1, its argument at 0.
    Fix(Box<Fun>),
}

/// A function body with its typing, written out in full so that
/// elaboration never has to guess the parameter type.
#[derive(Clone, Debug)]
pub struct Fun {
    pub ctx: Vec<Ty>,
    pub dom: Ty,
    pub cod: Ty,
    pub body: Exp,
}

impl Fun {
    fn surface(&self, head: &str) -> String {
        let ctx = self.ctx.iter().fold("emp".to_string(), |g, t| format!("(ext {g} {})", t.surface()));
        format!("({head} {ctx} {} {} {})", self.dom.surface(), self.cod.surface(), self.body.surface())
    }
}

#[derive(Clone, Debug)]
pub enum Exp {
    Ret(Val),
    App(Box<Exp>, Box<Exp>),
    If(Box<Exp>, Box<Exp>, Box<Exp>),
    Add(Val, Val),
    /// Binds the first component at index 1 and the second at 0.
    Pm(Val, Box<Exp>),
}

fn var_text(i: usize) -> String {
    if i == 0 {
        return "hd".into();
    }
    let mut sub = "wkn".to_string();
    for _ in 1..i {
        sub = format!("(cmp wkn {sub})");
    }
    format!("(val_subst {sub} hd)")
}

fn num_text(n: u32) -> String {
    (0..n).fold("nz".to_string(), |acc, _| format!("(ns {acc})"))
}

impl Val {
    pub fn surface(&self) -> String {
        match self {
            Val::Var(i) => var_text(*i),
            Val::True => "true".into(),
            Val::False => "false".into(),
            Val::Num(n) => format!("(nv {})", num_text(*n)),
            Val::Tt => "tt".into(),
            Val::Lam(f) => f.surface("lam"),
            Val::Pair(a, b) => format!("(pair {} {})", a.surface(), b.surface()),
            Val::Fix(f) => f.surface("fix"),
        }
    }
}

impl Exp {
    pub fn surface(&self) -> String {
        match self {
            Exp::Ret(v) => format!("(ret {})", v.surface()),
            Exp::App(f, a) => format!("(app {} {})", f.surface(), a.surface()),
            Exp::If(c, t, e) => format!("(if {} {} {})", c.surface(), t.surface(), e.surface()),
            Exp::Add(a, b) => format!("(add {} {})", a.surface(), b.surface()),
            Exp::Pm(v, e) => format!("(pm {} {})", v.surface(), e.surface()),
        }
    }
}

/// Which source features a generator may use.
#[derive(Clone, Copy, Debug)]
pub struct Features {
    pub nat: bool,
    pub unit: bool,
    pub prod: bool,
    pub fix: bool,
}

impl Features {
    pub const BOOL: Features = Features { nat: false, unit: false, prod: false, fix: false };
    pub const ALL: Features = Features { nat: true, unit: true, prod: true, fix: true };
}

pub struct Gen<'r, R: Rng> {
    pub rng: &'r mut R,
    pub features: Features,
}

impl<R: Rng> Gen<'_, R> {
    pub fn ty(&mut self, depth: usize) -> Ty {
        let mut base = vec![Ty::Bool];
        if self.features.nat {
            base.push(Ty::Nat);
        }
        if self.features.unit {
            base.push(Ty::Unit);
        }
        if depth == 0 || self.rng.gen_bool(0.6) {
            return base.choose(self.rng).unwrap().clone();
        }
        if self.features.prod && self.rng.gen_bool(0.4) {
            Ty::prod(self.ty(depth - 1), self.ty(depth - 1))
        } else {
            Ty::arr(self.ty(depth - 1), self.ty(depth - 1))
        }
    }

    /// `ctx[0]` is the outermost binder.
    pub fn val(&mut self, ctx: &[Ty], ty: &Ty, depth: usize) -> Val {
        let vars: Vec<usize> = (0..ctx.len()).filter(|&i| ctx[ctx.len() - 1 - i] == *ty).collect();
        if !vars.is_empty() && self.rng.gen_bool(0.4) {
            return Val::Var(*vars.choose(self.rng).unwrap());
        }
        match ty {
            Ty::Bool => {
                if self.rng.gen() {
                    Val::True
                } else {
                    Val::False
                }
            }
            Ty::Nat => Val::Num(self.rng.gen_range(0..3)),
            Ty::Unit => Val::Tt,
            Ty::Prod(a, b) => Val::Pair(Box::new(self.val(ctx, a, depth)), Box::new(self.val(ctx, b, depth))),
            Ty::Arr(a, b) => {
                if self.features.fix && depth > 0 && self.rng.gen_bool(0.15) {
                    let mut inner = ctx.to_vec();
                    inner.push(ty.clone());
                    inner.push((**a).clone());
                    let body = self.exp(&inner, b, depth - 1);
                    Val::Fix(Box::new(Fun { ctx: ctx.to_vec(), dom: (**a).clone(), cod: (**b).clone(), body }))
                } else {
                    let mut inner = ctx.to_vec();
                    inner.push((**a).clone());
                    let body = self.exp(&inner, b, depth.saturating_sub(1));
                    Val::Lam(Box::new(Fun { ctx: ctx.to_vec(), dom: (**a).clone(), cod: (**b).clone(), body }))
                }
            }
        }
    }

    pub fn exp(&mut self, ctx: &[Ty], ty: &Ty, depth: usize) -> Exp {
        if depth == 0 {
            return Exp::Ret(self.val(ctx, ty, 0));
        }
        let mut choices = vec![0, 1, 2];
        if self.features.nat && *ty == Ty::Nat {
            choices.push(3);
        }
        if self.features.prod {
            choices.push(4);
        }
        match *choices.choose(self.rng).unwrap() {
            0 => Exp::Ret(self.val(ctx, ty, depth - 1)),
            1 => {
                let a = self.ty(1);
                let f = self.exp(ctx, &Ty::arr(a.clone(), ty.clone()), depth - 1);
                Exp::App(Box::new(f), Box::new(self.exp(ctx, &a, depth - 1)))
            }
            2 => Exp::If(
                Box::new(self.exp(ctx, &Ty::Bool, depth - 1)),
                Box::new(self.exp(ctx, ty, depth - 1)),
                Box::new(self.exp(ctx, ty, depth - 1)),
            ),
            3 => Exp::Add(self.val(ctx, &Ty::Nat, depth - 1), self.val(ctx, &Ty::Nat, depth - 1)),
            _ => {
                let (a, b) = (self.ty(0), self.ty(0));
                let v = self.val(ctx, &Ty::prod(a.clone(), b.clone()), depth - 1);
                let mut inner = ctx.to_vec();
                inner.push(a);
                inner.push(b);
                Exp::Pm(v, Box::new(self.exp(&inner, ty, depth - 1)))
            }
        }
    }
}

/// Results of the reference evaluator.
#[derive(Clone, Debug)]
pub enum Value {
    Bool(bool),
    Num(u32),
    Unit,
    Pair(Box<Value>, Box<Value>),
    Closure(Vec<Value>, Exp),
    Rec(Vec<Value>, Exp),
}

/// Call-by-value evaluation with an explicit environment, innermost binder
/// last. `None` when `fuel` runs out.
pub fn eval(env: &[Value], e: &Exp, fuel: &mut usize) -> Option<Value> {
    *fuel = fuel.checked_sub(1)?;
    match e {
        Exp::Ret(v) => Some(eval_val(env, v)),
        Exp::App(f, a) => {
            let f = eval(env, f, fuel)?;
            let a = eval(env, a, fuel)?;
            match f {
                Value::Closure(mut cenv, body) => {
                    cenv.push(a);
                    eval(&cenv, &body, fuel)
                }
                Value::Rec(cenv, body) => {
                    let mut inner = cenv.clone();
                    inner.push(Value::Rec(cenv, body.clone()));
                    inner.push(a);
                    eval(&inner, &body, fuel)
                }
                other => panic!("ill-typed application of {other:?}"),
            }
        }
        Exp::If(c, t, f) => match eval(env, c, fuel)? {
            Value::Bool(true) => eval(env, t, fuel),
            Value::Bool(false) => eval(env, f, fuel),
            other => panic!("ill-typed condition {other:?}"),
        },
        Exp::Add(a, b) => match (eval_val(env, a), eval_val(env, b)) {
            (Value::Num(x), Value::Num(y)) => Some(Value::Num(x + y)),
            other => panic!("ill-typed addition {other:?}"),
        },
        Exp::Pm(v, body) => match eval_val(env, v) {
            Value::Pair(a, b) => {
                let mut inner = env.to_vec();
                inner.push(*a);
                inner.push(*b);
                eval(&inner, body, fuel)
            }
            other => panic!("ill-typed match on {other:?}"),
        },
    }
}

fn eval_val(env: &[Value], v: &Val) -> Value {
    match v {
        Val::Var(i) => env[env.len() - 1 - i].clone(),
        Val::True => Value::Bool(true),
        Val::False => Value::Bool(false),
        Val::Num(n) => Value::Num(*n),
        Val::Tt => Value::Unit,
        Val::Lam(f) => Value::Closure(env.to_vec(), f.body.clone()),
        Val::Pair(a, b) => Value::Pair(Box::new(eval_val(env, a)), Box::new(eval_val(env, b))),
        Val::Fix(f) => Value::Rec(env.to_vec(), f.body.clone()),
    }
}
