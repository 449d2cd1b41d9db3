//! Dense discrete factors over sorted variable scopes.

/// A non-negative table over a sorted list of variable indices. The last
/// variable varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Factor {
    vars: Vec<usize>,
    cards: Vec<usize>,
    values: Vec<f64>,
}

impl Factor {
    /// Build from an arbitrarily ordered scope, reordering values into sorted scope order.
    pub fn new(vars: Vec<usize>, cards: Vec<usize>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), cards.iter().product::<usize>());
        if vars.windows(2).all(|w| w[0] < w[1]) {
            return Self { vars, cards, values };
        }
        let mut perm: Vec<usize> = (0..vars.len()).collect();
        perm.sort_by_key(|&i| vars[i]);
        let sorted_vars: Vec<usize> = perm.iter().map(|&i| vars[i]).collect();
        let sorted_cards: Vec<usize> = perm.iter().map(|&i| cards[i]).collect();
        // Stride of each sorted axis inside the original layout.
        let original = strides(&cards);
        let source_strides: Vec<usize> = perm.iter().map(|&i| original[i]).collect();
        let mut out = Vec::with_capacity(values.len());
        walk(&sorted_cards, &[&source_strides], |idx| out.push(values[idx[0]]));
        Self { vars: sorted_vars, cards: sorted_cards, values: out }
    }

    pub fn unit() -> Self {
        Self { vars: Vec::new(), cards: Vec::new(), values: vec![1.0] }
    }

    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn contains(&self, var: usize) -> bool {
        self.vars.binary_search(&var).is_ok()
    }

    pub fn product(&self, other: &Factor) -> Factor {
        let mut vars = Vec::with_capacity(self.vars.len() + other.vars.len());
        let mut cards = Vec::with_capacity(vars.capacity());
        let (mut i, mut j) = (0, 0);
        while i < self.vars.len() || j < other.vars.len() {
            let take_left = j == other.vars.len() || (i < self.vars.len() && self.vars[i] <= other.vars[j]);
            let take_right = i == self.vars.len() || (j < other.vars.len() && other.vars[j] <= self.vars[i]);
            if take_left {
                vars.push(self.vars[i]);
                cards.push(self.cards[i]);
                i += 1;
                if take_right {
                    j += 1;
                }
            } else {
                vars.push(other.vars[j]);
                cards.push(other.cards[j]);
                j += 1;
            }
        }
        let sa = self.strides_in(&vars);
        let sb = other.strides_in(&vars);
        let mut values = Vec::with_capacity(cards.iter().product());
        walk(&cards, &[&sa, &sb], |idx| values.push(self.values[idx[0]] * other.values[idx[1]]));
        Factor { vars, cards, values }
    }

    /// Marginalize `var` out of the factor.
    pub fn sum_out(&self, var: usize) -> Factor {
        let Ok(pos) = self.vars.binary_search(&var) else {
            return self.clone();
        };
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(pos);
        cards.remove(pos);
        let mut out_strides = strides(&cards);
        out_strides.insert(pos, 0);
        let mut values = vec![0.0; cards.iter().product()];
        let mut k = 0;
        walk(&self.cards, &[&out_strides], |idx| {
            values[idx[0]] += self.values[k];
            k += 1;
        });
        Factor { vars, cards, values }
    }

    /// Restrict `var` to `state`, dropping it from the scope.
    pub fn reduce(&self, var: usize, state: usize) -> Factor {
        let Ok(pos) = self.vars.binary_search(&var) else {
            return self.clone();
        };
        let own = strides(&self.cards);
        let offset = own[pos] * state;
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(pos);
        cards.remove(pos);
        let mut src = own;
        src.remove(pos);
        let mut values = Vec::with_capacity(cards.iter().product());
        walk(&cards, &[&src], |idx| values.push(self.values[offset + idx[0]]));
        Factor { vars, cards, values }
    }

    /// Strides of this factor's axes laid over a superset scope (0 where absent).
    fn strides_in(&self, scope: &[usize]) -> Vec<usize> {
        let own = strides(&self.cards);
        scope
            .iter()
            .map(|v| match self.vars.binary_search(v) {
                Ok(p) => own[p],
                Err(_) => 0,
            })
            .collect()
    }
}

fn strides(cards: &[usize]) -> Vec<usize> {
    let mut s = vec![0; cards.len()];
    let mut acc = 1;
    for (slot, &c) in s.iter_mut().zip(cards).rev() {
        *slot = acc;
        acc *= c;
    }
    s
}

/// Visit every cell of the grid `cards` in row-major order, passing the
/// linear offsets induced by each stride vector.
fn walk<const N: usize>(cards: &[usize], stride_sets: &[&[usize]; N], mut visit: impl FnMut([usize; N])) {
    let total: usize = cards.iter().product();
    let dims = cards.len();
    let mut counter = vec![0usize; dims];
    let mut idx = [0usize; N];
    for _ in 0..total {
        visit(idx);
        for d in (0..dims).rev() {
            counter[d] += 1;
            for (i, s) in stride_sets.iter().enumerate() {
                idx[i] += s[d];
            }
            if counter[d] < cards[d] {
                break;
            }
            for (i, s) in stride_sets.iter().enumerate() {
                idx[i] -= s[d] * cards[d];
            }
            counter[d] = 0;
        }
    }
}
