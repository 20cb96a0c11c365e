# ------------------------------------------------------------------------------
# Native SVG output: an element tree plus a small set of plot layouts used for
# figure data (root scatter, beamformer overlay, stems, RMSE lines, heat map).
# ------------------------------------------------------------------------------

import html

import numpy as np


# Plots are assembled as a tree of elements.
class Node:

    def __init__(self, tag=None, attributes=None, text=None, is_void=False):
        self.tag = tag
        self.text = text or ''
        self.children = []
        self.attributes = attributes or {}
        self.is_void = is_void

    def __str__(self):
        return self.str()

    def str(self, depth=0):
        output = ["·  " * depth, self.__class__.__name__]
        if self.tag:
            output.append(' ' + self.opening_tag())
        if self.text:
            output.append(' ' + repr(self.text))
        output.append('\n')
        for child in self.children:
            output.append(child.str(depth + 1))
        return ''.join(output)

    def render(self):
        if self.is_void:
            return self.opening_tag()[:-1] + '/>\n'
        output = [self.opening_tag()]
        if self.children:
            output.append('\n')
            output.append(''.join(child.render() for child in self.children))
        elif self.text:
            output.append(html.escape(self.text, quote=False))
        output.append(self.closing_tag() + '\n')
        return ''.join(output)

    def opening_tag(self):
        attributes = []
        for key, value in sorted(self.attributes.items()):
            if isinstance(value, float):
                value = '%.3f' % value
            attributes.append(' %s="%s"' % (key, html.escape(str(value))))
        return '<%s%s>' % (self.tag, ''.join(attributes))

    def closing_tag(self):
        return '</%s>' % self.tag

    def append_child(self, node):
        self.children.append(node)
        return self


def element(tag, text=None, **attributes):
    attributes = {key.replace('_', '-'): value for key, value in attributes.items()}
    return Node(tag, attributes, text, is_void=text is None)


PALETTE = ('#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b')


# A rectangular plot area with linear axes.
class Figure:

    def __init__(self, xlim, ylim, width=640, height=420, margin=56, title=None,
                 xlabel=None, ylabel=None, equal=False):
        self.width, self.height, self.margin = width, height, margin
        self.xlim = _padded(xlim)
        self.ylim = _padded(ylim)
        if equal:
            self.height = int(round(margin * 2 + (width - 2 * margin)
                                    * np.ptp(self.ylim) / np.ptp(self.xlim)))
        self.root = Node('svg', {
            'xmlns': 'http://www.w3.org/2000/svg',
            'width': self.width,
            'height': self.height,
            'viewBox': '0 0 %d %d' % (self.width, self.height),
            'font-family': 'sans-serif',
            'font-size': 11,
        })
        self.root.append_child(element('rect', x=0, y=0, width=self.width, height=self.height, fill='white'))
        self.plot = Node('g')
        self._axes(title, xlabel, ylabel)
        self.root.append_child(self.plot)

    def x(self, value):
        lo, hi = self.xlim
        return self.margin + (value - lo) / (hi - lo) * (self.width - 2 * self.margin)

    def y(self, value):
        lo, hi = self.ylim
        return self.height - self.margin - (value - lo) / (hi - lo) * (self.height - 2 * self.margin)

    def _axes(self, title, xlabel, ylabel):
        left, right = self.margin, self.width - self.margin
        top, bottom = self.margin, self.height - self.margin
        axes = Node('g', {'stroke': '#444', 'stroke-width': 1})
        axes.append_child(element('rect', x=left, y=top, width=right - left, height=bottom - top, fill='none'))
        labels = Node('g', {'fill': '#222'})
        for tick in _ticks(*self.xlim):
            axes.append_child(element('line', x1=self.x(tick), x2=self.x(tick), y1=bottom, y2=bottom + 4))
            labels.append_child(element('text', '%g' % tick, x=self.x(tick), y=bottom + 16, text_anchor='middle'))
        for tick in _ticks(*self.ylim):
            axes.append_child(element('line', x1=left - 4, x2=left, y1=self.y(tick), y2=self.y(tick)))
            labels.append_child(element('text', '%g' % tick, x=left - 7, y=self.y(tick) + 4, text_anchor='end'))
        if title:
            labels.append_child(element('text', title, x=self.width / 2, y=top - 16, text_anchor='middle', font_size=13))
        if xlabel:
            labels.append_child(element('text', xlabel, x=self.width / 2, y=self.height - 14, text_anchor='middle'))
        if ylabel:
            labels.append_child(element('text', ylabel, x=16, y=self.height / 2, text_anchor='middle',
                                        transform='rotate(-90 16 %.1f)' % (self.height / 2)))
        self.root.append_child(axes)
        self.root.append_child(labels)

    def line(self, xs, ys, color=PALETTE[0], width=1.5, dashed=False):
        points = ' '.join('%.2f,%.2f' % (self.x(x), self.y(y)) for x, y in zip(xs, ys))
        attributes = dict(points=points, fill='none', stroke=color, stroke_width=width)
        if dashed:
            attributes['stroke_dasharray'] = '5,4'
        self.plot.append_child(element('polyline', **attributes))

    def scatter(self, xs, ys, color=PALETTE[0], radius=3.0, hollow=False):
        group = Node('g', {'fill': 'none' if hollow else color, 'stroke': color})
        for x, y in zip(xs, ys):
            group.append_child(element('circle', cx=self.x(x), cy=self.y(y), r=radius))
        self.plot.append_child(group)

    def stems(self, xs, ys, color=PALETTE[1], base=0.0):
        group = Node('g', {'stroke': color, 'fill': color, 'stroke-width': 1.5})
        for x, y in zip(xs, ys):
            group.append_child(element('line', x1=self.x(x), x2=self.x(x), y1=self.y(base), y2=self.y(y)))
            group.append_child(element('circle', cx=self.x(x), cy=self.y(y), r=3.0))
        self.plot.append_child(group)

    def cell(self, x0, x1, y0, y1, color):
        self.plot.append_child(element('rect', x=self.x(x0), y=self.y(y1), width=self.x(x1) - self.x(x0),
                                       height=self.y(y0) - self.y(y1), fill=color, stroke='none'))

    def legend(self, entries):
        group = Node('g')
        for index, (label, color) in enumerate(entries):
            y = self.margin + 14 + 16 * index
            x = self.width - self.margin - 120
            group.append_child(element('line', x1=x, x2=x + 18, y1=y - 4, y2=y - 4, stroke=color, stroke_width=2))
            group.append_child(element('text', label, x=x + 24, y=y, fill='#222'))
        self.plot.append_child(group)

    def render(self):
        return self.root.render()

    def save(self, path):
        with open(path, 'w', encoding='utf-8') as file:
            file.write(self.render())


def _padded(limits):
    lo, hi = float(limits[0]), float(limits[1])
    if hi <= lo:
        lo, hi = lo - 1.0, hi + 1.0
    return lo, hi


# Roughly six round-numbered ticks covering [lo, hi].
def _ticks(lo, hi, count=6):
    raw = (hi - lo) / count
    step = 10 ** np.floor(np.log10(raw))
    for factor in (1, 2, 5, 10):
        if raw <= factor * step:
            step = factor * step
            break
    return np.arange(np.ceil(lo / step) * step, hi + step * 1e-9, step)


# Linear blend from white through blue to dark for a value in [0, 1].
def _colour(value):
    stops = np.array([[255, 255, 255], [70, 130, 200], [20, 20, 60]], dtype=float)
    value = float(np.clip(value, 0.0, 1.0)) * 2
    index = min(int(value), 1)
    rgb = stops[index] + (stops[index + 1] - stops[index]) * (value - index)
    return '#%02x%02x%02x' % tuple(int(round(c)) for c in rgb)


# ------------------------------------------------------------------------------
# Plot layouts.
# ------------------------------------------------------------------------------


# Roots of p in the complex plane with the unit circle; kept roots filled.
def root_scatter(rootset, title='Roots of p(z)'):
    roots = rootset.roots
    extent = max(1.5, min(3.0, float(np.abs(roots).max()) * 1.05 if len(roots) else 1.5))
    fig = Figure((-extent, extent), (-extent, extent), title=title, xlabel='Re z', ylabel='Im z', equal=True)
    circle = np.exp(1j * np.linspace(0, 2 * np.pi, 361))
    fig.line(circle.real, circle.imag, color='#888', width=1)
    kept = rootset.kept
    inside = np.abs(roots) <= extent
    fig.scatter(roots[~kept & inside].real, roots[~kept & inside].imag, PALETTE[0], hollow=True)
    fig.scatter(roots[kept].real, roots[kept].imag, PALETTE[1])
    return fig


# Normalised beamformer spectrum with the estimated DOAs as stems of
# normalised amplitude and the true DOAs dashed.
def cbf_overlay(grid_deg, spectrum, doas_deg, amplitudes, truth_deg=(), title='CBF and estimate'):
    fig = Figure((min(grid_deg), max(grid_deg)), (0.0, 1.05), title=title, xlabel='DOA (degrees)',
                 ylabel='normalised magnitude')
    peak = max(float(np.max(spectrum)), 1e-300)
    fig.line(grid_deg, np.asarray(spectrum) / peak)
    for doa in truth_deg:
        fig.line((doa, doa), (0.0, 1.05), color='#888', width=1, dashed=True)
    magnitudes = np.abs(amplitudes)
    if len(magnitudes):
        fig.stems(doas_deg, magnitudes / max(magnitudes.max(), 1e-300))
    fig.legend([('CBF', PALETTE[0]), ('estimate', PALETTE[1])])
    return fig


# Sparse coefficient magnitudes over the dictionary angles.
def profile_stems(pruning, title='Sparse coefficients'):
    magnitudes = np.abs(pruning.x_star)
    fig = Figure((-180.0, 180.0), (0.0, max(float(magnitudes.max()) if len(magnitudes) else 1.0, 1e-12) * 1.05),
                 title=title, xlabel='DOA (degrees)', ylabel='|x|')
    fig.stems(np.degrees(pruning.dictionary.angles), magnitudes)
    return fig


# RMSE against SNR, one line per delta multiplier.
def rmse_lines(rows, title='RMSE vs SNR'):
    snrs = sorted({row['snr_db'] for row in rows})
    multipliers = sorted({row['delta_mult'] for row in rows})
    finite = [row['rmse_deg'] for row in rows if np.isfinite(row['rmse_deg'])]
    fig = Figure((min(snrs), max(snrs)), (0.0, max(finite + [1e-3]) * 1.1), title=title,
                 xlabel='SNR (dB)', ylabel='RMSE (degrees)')
    entries = []
    for index, mult in enumerate(multipliers):
        color = PALETTE[index % len(PALETTE)]
        series = sorted((row['snr_db'], row['rmse_deg']) for row in rows if row['delta_mult'] == mult)
        xs, ys = zip(*series)
        fig.line(xs, ys, color=color)
        fig.scatter(xs, ys, color=color)
        entries.append(('delta = %g e_n' % mult, color))
    fig.legend(entries)
    return fig


# Heat map of the coefficient power spectrum in dB against radius and index.
def spectrum_heatmap(radii, k, table_db, floor_db=-160.0, title='Fourier-series power (dB)'):
    radii, k = np.asarray(radii, dtype=float), np.asarray(k, dtype=float)
    dr = radii[1] - radii[0] if len(radii) > 1 else 1.0
    fig = Figure((k[0] - 0.5, k[-1] + 0.5), (radii[0] - dr / 2, radii[-1] + dr / 2), title=title,
                 xlabel='Fourier index k', ylabel='radius (wavelengths)')
    for i, radius in enumerate(radii):
        for j, index in enumerate(k):
            fig.cell(index - 0.5, index + 0.5, radius - dr / 2, radius + dr / 2,
                     _colour(1.0 - table_db[i, j] / floor_db))
    return fig
