#!/usr/bin/env python3
"""Regenerate the bundled CNN workload descriptors under data/networks/.

Walks the canonical torchvision model definitions (architecture only, no
weights) with forward hooks to capture per-layer input geometry, and emits
the flat layer-table JSON consumed by the simulator.

Conventions:
  - Conv2d        -> kind "conv" (or "depthwise_conv" when groups == in_channels)
  - Linear        -> kind "fully_connected" (K=1, D=in_features, L=out_features)
  - MaxPool2d     -> kind "pool"
  - BatchNorm, ReLU, dropout, average/adaptive pools and reshapes are folded
    into the adjacent layers; they carry no kernel tensors and their latency
    is covered by the per-layer activation/pooling events in the simulator.
  - GoogLeNet is exported with its two auxiliary classifier branches, since
    the published kernel censuses for it include them.

Usage: python3 scripts/generate_network_descriptors.py [outdir]
"""

import json
import sys

import torch
import torch.nn as nn
import torchvision.models as models


def extract(model, name, image_hw=224):
    rows = []

    def hook(mod, inp, out):
        x = inp[0]
        h, w = (int(x.shape[2]), int(x.shape[3])) if x.dim() == 4 else (1, 1)
        if isinstance(mod, nn.Conv2d):
            k = mod.kernel_size[0]
            stride = mod.stride[0]
            pad = mod.padding[0] if isinstance(mod.padding, tuple) else mod.padding
            depthwise = mod.groups == mod.in_channels and mod.groups > 1
            rows.append({
                "name": f"{mod._layer_name}",
                "kind": "depthwise_conv" if depthwise else "conv",
                "H": h, "W": w, "D": int(mod.in_channels),
                "K": int(k), "L": int(mod.out_channels),
                "stride": int(stride), "padding": int(pad),
            })
        elif isinstance(mod, nn.MaxPool2d):
            k = mod.kernel_size if isinstance(mod.kernel_size, int) else mod.kernel_size[0]
            stride = mod.stride if isinstance(mod.stride, int) else mod.stride[0]
            pad = mod.padding if isinstance(mod.padding, int) else mod.padding[0]
            rows.append({
                "name": f"{mod._layer_name}",
                "kind": "pool",
                "H": h, "W": w, "D": int(x.shape[1]),
                "K": int(k), "L": int(x.shape[1]),
                "stride": int(stride), "padding": int(pad),
            })
        elif isinstance(mod, nn.Linear):
            rows.append({
                "name": f"{mod._layer_name}",
                "kind": "fully_connected",
                "H": 1, "W": 1, "D": int(mod.in_features),
                "K": 1, "L": int(mod.out_features),
                "stride": 1, "padding": 0,
            })

    handles = []
    for mod_name, mod in model.named_modules():
        if isinstance(mod, (nn.Conv2d, nn.MaxPool2d, nn.Linear)):
            mod._layer_name = mod_name
            handles.append(mod.register_forward_hook(hook))

    model.eval()
    with torch.no_grad():
        model(torch.zeros(1, 3, image_hw, image_hw))
    for h in handles:
        h.remove()
    return {"name": name, "layers": rows}


def extract_googlenet():
    """GoogLeNet with auxiliary branches; eval() skips them, so the aux
    sub-networks are traced separately on dummy tensors of the right shape."""
    m = models.googlenet(weights=None, aux_logits=True, init_weights=False)
    main = extract(m, "googlenet")

    def trace_aux(aux, prefix, in_ch, spatial):
        rows = []

        def hook(mod, inp, out):
            if isinstance(mod, nn.Conv2d):
                rows.append({
                    "name": f"{prefix}.{mod._layer_name}",
                    "kind": "conv",
                    "H": int(inp[0].shape[2]), "W": int(inp[0].shape[3]),
                    "D": int(mod.in_channels), "K": int(mod.kernel_size[0]),
                    "L": int(mod.out_channels),
                    "stride": int(mod.stride[0]), "padding": int(mod.padding[0]),
                })
            elif isinstance(mod, nn.Linear):
                rows.append({
                    "name": f"{prefix}.{mod._layer_name}",
                    "kind": "fully_connected",
                    "H": 1, "W": 1, "D": int(mod.in_features),
                    "K": 1, "L": int(mod.out_features),
                    "stride": 1, "padding": 0,
                })

        handles = []
        for mod_name, mod in aux.named_modules():
            if isinstance(mod, (nn.Conv2d, nn.Linear)):
                mod._layer_name = mod_name
                handles.append(mod.register_forward_hook(hook))
        aux.eval()
        with torch.no_grad():
            aux(torch.zeros(1, in_ch, spatial, spatial))
        for h in handles:
            h.remove()
        return rows

    # aux1 taps inception4a output (512ch, 14x14), aux2 taps 4d (528ch, 14x14)
    main["layers"] += trace_aux(m.aux1, "aux1", 512, 14)
    main["layers"] += trace_aux(m.aux2, "aux2", 528, 14)
    return main


def main():
    outdir = sys.argv[1] if len(sys.argv) > 1 else "data/networks"
    nets = {
        "resnet50": extract(models.resnet50(weights=None), "resnet50"),
        "googlenet": extract_googlenet(),
        "mobilenet_v2": extract(models.mobilenet_v2(weights=None), "mobilenet_v2"),
        "shufflenet_v2": extract(models.shufflenet_v2_x1_0(weights=None), "shufflenet_v2"),
    }
    for fname, net in nets.items():
        path = f"{outdir}/{fname}.json"
        with open(path, "w") as f:
            json.dump(net, f, indent=1)
            f.write("\n")
        n_layers = len(net["layers"])
        print(f"{path}: {n_layers} layers")


if __name__ == "__main__":
    main()
