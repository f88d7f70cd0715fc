/// Adaptive truncation rule.
///
/// After iteration `i` with estimate `τ̃_i`, the truncation parameter becomes
/// `min(i+1, 2t)` when both `tol_τ·τ̃_i ≥ 1` and `τ̃_i > 1.1·τ̃_{i−1}`. The
/// history starts at `τ̃₀ = +∞`, so the first iteration of a cycle never fires.
#[derive(Clone, Debug)]
pub struct AdaptiveTruncation {
    tol_tau: f64,
    prev_tau: f64,
}

impl AdaptiveTruncation {
    pub const GROWTH: f64 = 1.1;

    pub fn new(tol_tau: f64) -> Self {
        Self {
            tol_tau,
            prev_tau: f64::INFINITY,
        }
    }

    pub fn tol_tau(&self) -> f64 {
        self.tol_tau
    }

    /// Forgets the `τ̃` history; called at the start of every cycle.
    pub fn reset(&mut self) {
        self.prev_tau = f64::INFINITY;
    }

    /// Feeds `τ̃_i`; returns the new truncation parameter when the rule fires.
    pub fn observe(&mut self, i: usize, tau: f64, t: usize) -> Option<usize> {
        let fire = self.tol_tau * tau >= 1.0 && tau > Self::GROWTH * self.prev_tau;
        self.prev_tau = tau;
        fire.then(|| (i + 1).min(2 * t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_at_first_qualifying_iteration() {
        let mut rule = AdaptiveTruncation::new(1e-3);
        let taus = [10.0, 100.0, 600.0, 1200.0, 1250.0];
        let mut t = 1;
        let mut fired = Vec::new();
        for (k, &tau) in taus.iter().enumerate() {
            if let Some(new_t) = rule.observe(k + 1, tau, t) {
                fired.push((k + 1, new_t));
                t = new_t;
            }
        }
        // i = 4: τ̃ = 1200 ≥ 1000 and 1200 > 1.1·600 → t = min(5, 2) = 2; i = 5 grows by < 10%
        assert_eq!(fired, vec![(4, 2)]);
    }

    #[test]
    fn first_iteration_never_fires() {
        let mut rule = AdaptiveTruncation::new(1.0);
        assert_eq!(rule.observe(1, 1e300, 1), None);
        assert_eq!(rule.observe(2, 1e301, 1), Some(2));
        rule.reset();
        assert_eq!(rule.observe(1, 1e302, 2), None);
    }

    #[test]
    fn clamps_at_next_iteration_index() {
        let mut rule = AdaptiveTruncation::new(1.0);
        rule.observe(2, 2.0, 50);
        assert_eq!(rule.observe(3, 4.0, 50), Some(4));
    }

    #[test]
    fn below_tolerance_never_fires() {
        let mut rule = AdaptiveTruncation::new(1e-16);
        let mut tau = 1.0;
        for i in 1..50 {
            assert_eq!(rule.observe(i, tau, 1), None);
            tau *= 2.0;
        }
    }
}
