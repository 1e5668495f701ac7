"""Shared training-loop machinery: early stopping, LR plateau schedule,
minibatch iteration."""

import numpy as np


class EarlyStopping:
    """Stop after `patience` consecutive epochs without validation improvement.

    patience 0 disables stopping; the best epoch is still tracked so the
    caller can restore the best parameters seen.
    """

    def __init__(self, patience):
        self.patience = patience
        self.best = np.inf
        self.best_epoch = -1
        self.stale = 0

    def update(self, val_loss, epoch) -> bool:
        """Record one epoch; returns True when training should stop."""
        if val_loss < self.best:
            self.best = val_loss
            self.best_epoch = epoch
            self.stale = 0
            return False
        self.stale += 1
        return self.patience > 0 and self.stale >= self.patience


class PlateauLR:
    """Multiply the learning rate by `factor` after `patience` consecutive
    epochs without improvement, floored at `min_lr`."""

    def __init__(self, lr, factor=0.5, patience=3, min_lr=1e-5):
        self.lr = lr
        self.factor = factor
        self.patience = patience
        self.min_lr = min_lr
        self.best = np.inf
        self.stale = 0

    def update(self, val_loss) -> float:
        if val_loss < self.best:
            self.best = val_loss
            self.stale = 0
            return self.lr
        self.stale += 1
        if self.patience > 0 and self.stale >= self.patience:
            self.lr = max(self.lr * self.factor, self.min_lr)
            self.stale = 0
        return self.lr


def minibatches(n, batch_size, rng):
    """Yield index arrays covering 0..n-1 in shuffled order."""
    order = rng.permutation(n)
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]
