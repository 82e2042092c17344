"""UMEF bundle export for trained (or freshly initialized) models."""

import torch

from .interchange import write_umef


def export_bundles(model, c1, f1, c2, f2, src_path, dst_path):
    """Run the model on one canonical pair and write both UMEF bundles."""
    # run in double precision so the interchange round trip is exact; the
    # zero-initialized heads then reproduce the input bundles bit for bit
    model.double().eval()
    with torch.no_grad():
        dtype = torch.float64
        t1 = torch.as_tensor(c1, dtype=dtype).unsqueeze(0)
        t2 = torch.as_tensor(c2, dtype=dtype).unsqueeze(0)
        g1 = torch.as_tensor(f1, dtype=dtype).unsqueeze(0)
        g2 = torch.as_tensor(f2, dtype=dtype).unsqueeze(0)
        r1, f1_hat, r2, f2_hat = model(t1, g1, t2, g2)
    write_umef(r1[0].numpy(), f1_hat[0].numpy(), src_path)
    write_umef(r2[0].numpy(), f2_hat[0].numpy(), dst_path)
