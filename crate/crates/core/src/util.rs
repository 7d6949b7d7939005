/// Calls `f` on every index tuple `(i_1, …, i_k)` with `i_j < sizes[j]`,
/// in lexicographic order. The empty tuple is visited once.
pub(crate) fn for_each_index(sizes: &[usize], mut f: impl FnMut(&[usize])) {
    if sizes.contains(&0) {
        return;
    }
    let mut idx = vec![0; sizes.len()];
    loop {
        f(&idx);
        let mut pos = sizes.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < sizes[pos] {
                break;
            }
            idx[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odometer_counts() {
        let mut n = 0;
        for_each_index(&[2, 3, 1], |_| n += 1);
        assert_eq!(n, 6);
        let mut n = 0;
        for_each_index(&[], |_| n += 1);
        assert_eq!(n, 1);
        let mut n = 0;
        for_each_index(&[2, 0], |_| n += 1);
        assert_eq!(n, 0);
    }
}
