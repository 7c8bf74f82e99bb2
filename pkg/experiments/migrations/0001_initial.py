# Generated by Django 5.2.8 on 2026-10-18 10:12

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(db_index=True, max_length=120)),
                ('seed', models.BigIntegerField(default=0)),
                ('host_kind', models.CharField(choices=[('am', 'AM audio'), ('fm', 'FM audio'), ('pam8', '8-PAM complex baseband (TV-like)')], max_length=8)),
                ('plan_text', models.TextField(blank=True, help_text='Plan file exactly as it was read')),
                ('out_dir', models.CharField(blank=True, max_length=500)),
                ('status', models.CharField(choices=[('running', 'Running'), ('done', 'Done'), ('failed', 'Failed')], db_index=True, default='running', max_length=12)),
                ('rows_total', models.PositiveIntegerField(default=0)),
                ('rows_flagged', models.PositiveIntegerField(default=0, help_text='Infeasible cells (message did not fit the host)')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('finished_at', models.DateTimeField(blank=True, null=True)),
            ],
            options={
                'ordering': ['-created_at', '-id'],
            },
        ),
        migrations.CreateModel(
            name='SweepRow',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('position', models.PositiveIntegerField(help_text='Index of the cell in the plan grid')),
                ('variant', models.CharField(choices=[('scalar', 'Scalar QIM'), ('scalar_dc', 'Scalar DC-QIM'), ('lattice', 'Lattice QIM'), ('lattice_dc', 'Lattice DC-QIM')], db_index=True, max_length=12)),
                ('levels', models.PositiveIntegerField()),
                ('alpha', models.FloatField(blank=True, null=True)),
                ('snr_db', models.FloatField(blank=True, help_text='Empty = noiseless channel', null=True)),
                ('bit_rate', models.FloatField()),
                ('trial', models.PositiveIntegerField(default=0)),
                ('samples_per_bit', models.PositiveIntegerField(default=0)),
                ('step', models.FloatField(blank=True, null=True)),
                ('bits_tested', models.PositiveIntegerField(default=0)),
                ('ber', models.FloatField(blank=True, null=True)),
                ('d_s', models.FloatField(blank=True, null=True)),
                ('d_norm', models.FloatField(blank=True, help_text='Normalized distortion (%)', null=True)),
                ('psnr_db', models.FloatField(blank=True, help_text='Empty = infinite (no distortion)', null=True)),
                ('throughput_bps', models.FloatField(blank=True, null=True)),
                ('info_rate_bps', models.FloatField(blank=True, null=True)),
                ('capacity_bits_per_sample', models.FloatField(blank=True, null=True)),
                ('audio_snr_db', models.FloatField(blank=True, null=True)),
                ('host_ser', models.FloatField(blank=True, null=True)),
                ('error', models.TextField(blank=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='rows', to='experiments.experimentrun')),
            ],
            options={
                'ordering': ['run', 'position'],
                'unique_together': {('run', 'position')},
            },
        ),
    ]
